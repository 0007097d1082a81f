#include "flowpet/fd_check.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace flowpet {

double central_difference(const ObjectiveFn& J, const ParameterSet& p, ParamBlock b,
                          int cell, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("central_difference: eps must be positive");
  ParameterSet q = p;
  ScalarField& f = block_field(q, b);
  const double base = f[cell];
  f[cell] = base + eps;
  const double jp = J(q);
  f[cell] = base - eps;
  const double jm = J(q);
  return (jp - jm) / (2.0 * eps);
}

GradCheckReport gradient_check(const ObjectiveFn& J, const ParameterSet& p,
                               const ParameterSet& analytic,
                               std::span<const double> eps_sweep, int cells_per_block) {
  if (eps_sweep.empty()) throw std::invalid_argument("gradient_check: empty eps sweep");
  GradCheckReport report;
  const int n_cells = p.grid().cells();

  for (ParamBlock b : all_param_blocks) {
    const ScalarField& af = block_field(analytic, b);
    std::vector<int> order(static_cast<size_t>(n_cells));
    for (int c = 0; c < n_cells; ++c) order[static_cast<size_t>(c)] = c;
    std::stable_sort(order.begin(), order.end(), [&](int a, int bb) {
      return std::abs(af[a]) > std::abs(af[bb]);
    });
    const int take = std::min(cells_per_block, n_cells);
    for (int s = 0; s < take; ++s) {
      const int cell = order[static_cast<size_t>(s)];
      const double a = af[cell];
      double best_fd = 0.0;
      double best_rel = std::numeric_limits<double>::infinity();
      for (double eps : eps_sweep) {
        const double fd = central_difference(J, p, b, cell, eps);
        const double denom = std::max(std::abs(a), std::abs(fd));
        const double rel = denom < 1e-300 ? 0.0 : std::abs(a - fd) / denom;
        if (rel < best_rel) {
          best_rel = rel;
          best_fd = fd;
        }
      }
      report.rows.push_back({b, cell, a, best_fd, best_rel});
      report.max_rel_err = std::max(report.max_rel_err, best_rel);
    }
  }
  return report;
}

void write_gradcheck_csv(const std::string& path, const GradCheckReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  os << "block,cell,analytic,fd,rel_err\n";
  for (const GradCheckRow& r : report.rows)
    os << block_name(r.block) << ',' << r.cell << ',' << r.analytic << ',' << r.fd << ','
       << r.rel_err << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace flowpet
