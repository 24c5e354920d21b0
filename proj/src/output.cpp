#include "qcsim/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qcsim/config.hpp"

namespace qcsim {

void write_timeseries(const Trajectory& traj, std::ostream& out)
{
  out << kTimeseriesHeader << "\n";
  for (const StepRecord& r : traj.steps) {
    const EnergyReport& e = r.energy;
    out << r.step;
    for (double v : {r.t, e.total, e.kinetic, e.phason_potential, e.grad_u, e.grad_nu, e.div_u, e.div_nu, e.cross_grad,
                     e.cross_div, e.dissipated_step, e.gyro_power, r.balance_residual, r.nu_t_maxnorm})
      out << ',' << format_double(v);
    out << "\n";
  }
}

void write_snapshot(const FieldState& s, std::ostream& out)
{
  const Grid& g = *s.u.grid;
  out << "dim " << g.dim() << "\n";
  out << "n";
  for (int a = 0; a < g.dim(); ++a) out << ' ' << g.n()[a];
  out << "\nh";
  for (int a = 0; a < g.dim(); ++a) out << ' ' << format_double(g.h()[a]);
  out << "\nt " << format_double(s.t) << "\n";

  const Index3 lo{1, 1, g.dim() == 3 ? 1 : 0};
  const Index3 hi{g.n()[0], g.n()[1], g.dim() == 3 ? g.n()[2] : 0};
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = lo[2]; k <= hi[2]; ++k) {
        const std::size_t idx = g.index(i, j, k);
        out << i << ' ' << j;
        if (g.dim() == 3) out << ' ' << k;
        for (const VectorField* f : {&s.u, &s.ut, &s.nu})
          for (double v : f->values[idx]) out << ' ' << format_double(v);
        out << "\n";
      }
}

namespace {

double to_double(const std::string& tok)
{
  double v;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw std::runtime_error("snapshot: bad number '" + tok + "'");
  return v;
}

std::istringstream header_line(std::istream& in, const std::string& tag)
{
  std::string line, word;
  if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing '" + tag + "' line");
  std::istringstream ls(line);
  ls >> word;
  if (word != tag) throw std::runtime_error("snapshot: expected '" + tag + "' line");
  return ls;
}

}  // namespace

FieldState read_snapshot(std::istream& in, GridPtr grid)
{
  const Grid& g = *grid;
  int dim = 0;
  header_line(in, "dim") >> dim;
  if (dim != g.dim()) throw std::runtime_error("snapshot: dimension does not match the grid");
  {
    auto ls = header_line(in, "n");
    for (int a = 0; a < dim; ++a) {
      int n = 0;
      ls >> n;
      if (n != g.n()[a]) throw std::runtime_error("snapshot: node counts do not match the grid");
    }
  }
  header_line(in, "h");
  std::string tok;
  header_line(in, "t") >> tok;

  FieldState s{to_double(tok), VectorField(grid), VectorField(grid), VectorField(grid)};
  std::string line;
  std::size_t rows = 0;
  std::vector<bool> seen(g.node_count(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Index3 p{0, 0, 0};
    for (int a = 0; a < dim; ++a) ls >> p[a];
    bool ok = static_cast<bool>(ls);
    for (int a = 0; a < dim; ++a) ok = ok && p[a] >= 1 && p[a] <= g.n()[a];
    if (!ok) throw std::runtime_error("snapshot: bad node index");
    const std::size_t idx = g.index(p);
    if (seen[idx]) throw std::runtime_error("snapshot: repeated node");
    seen[idx] = true;
    for (VectorField* f : {&s.u, &s.ut, &s.nu})
      for (double& v : f->values[idx]) {
        if (!(ls >> tok)) throw std::runtime_error("snapshot: short row");
        v = to_double(tok);
      }
    ++rows;
  }
  if (rows != g.interior_count()) throw std::runtime_error("snapshot: wrong number of rows");
  s.u.set_boundary(g.bc_u());
  s.nu.set_boundary(g.bc_nu());
  return s;
}

void write_viscosity_table(const ConvergenceTable& t, std::ostream& out)
{
  out << "eps_visc,delta_visc,diff_u,diff_nu\n";
  for (const ViscosityRung& r : t.rungs)
    out << format_double(r.eps_visc) << ',' << format_double(r.delta_visc) << ',' << format_double(r.diff_u) << ','
        << format_double(r.diff_nu) << "\n";
}

void write_mms_table(const MmsTable& t, std::ostream& out)
{
  out << "n,h,dt,steps,err_u,err_nu\n";
  for (const MmsLevel& l : t.levels)
    out << l.n << ',' << format_double(l.h) << ',' << format_double(l.dt) << ',' << l.steps << ','
        << format_double(l.err_u) << ',' << format_double(l.err_nu) << "\n";
}

void write_difference_table(const DifferenceReport& r, std::ostream& out)
{
  out << "step,energy,balance_residual\n";
  for (std::size_t n = 0; n < r.energy.size(); ++n)
    out << n << ',' << format_double(r.energy[n]) << ',' << format_double(n == 0 ? 0.0 : r.residuals[n - 1]) << "\n";
}

void write_bound_table(const Trajectory& traj, const BoundReport& b, std::ostream& out)
{
  out << "step,t,lhs,ratio\n";
  for (std::size_t n = 0; n < b.lhs.size(); ++n)
    out << traj.steps[n].step << ',' << format_double(traj.steps[n].t) << ',' << format_double(b.lhs[n]) << ','
        << format_double(b.ratio[n]) << "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace qcsim
