#include "oracles.hpp"

#include <algorithm>
#include <map>

#include <gsl/gsl_cdf.h>

namespace oracle {

double chisq_upper_tail(double stat, double dof) { return gsl_cdf_chisq_Q(stat, dof); }

double chisq_gof_pvalue(const std::vector<long>& draws, const std::function<double(long)>& pmf,
                        double min_expected)
{
  std::map<long, long> observed;
  long max_draw = 0;
  for (long d : draws) {
    ++observed[d];
    max_draw = std::max(max_draw, d);
  }
  const double n = static_cast<double>(draws.size());

  // Adjacent values are merged until each cell expects min_expected; the
  // last cell absorbs the whole upper tail.
  struct Cell {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Cell> cells;
  Cell cur;
  double mass = 0.0;
  for (long y = 0; mass < 1.0 - 1e-15 && y <= max_draw + 1000; ++y) {
    const double p = pmf(y);
    mass += p;
    cur.expected += n * p;
    cur.observed += static_cast<double>(observed.count(y) ? observed[y] : 0);
    if (cur.expected >= min_expected) {
      cells.push_back(cur);
      cur = Cell{};
    }
  }
  // tail beyond the loop and any leftover partial cell
  double seen = 0.0;
  for (const Cell& c : cells)
    seen += c.observed;
  cur.observed = n - seen;
  cur.expected += n * std::max(0.0, 1.0 - mass);
  if (cells.empty() || cur.expected >= min_expected) {
    cells.push_back(cur);
  }
  else {
    cells.back().expected += cur.expected;
    cells.back().observed += cur.observed;
  }
  if (cells.size() < 2)
    return 1.0;
  double stat = 0.0;
  for (const Cell& c : cells)
    stat += (c.observed - c.expected) * (c.observed - c.expected) / c.expected;
  return chisq_upper_tail(stat, static_cast<double>(cells.size() - 1));
}

}  // namespace oracle
