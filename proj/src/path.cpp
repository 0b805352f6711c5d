#include "relosc/path.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "relosc/sampling.hpp"

namespace relosc {

Mat PeriodicPath::increments() const {
  const int N = this->N();
  Mat d(dim(), N);
  for (int k = 0; k < N; ++k) d.col(k) = nodes.col((k + 1) % N) - nodes.col(k);
  return d;
}

double PeriodicPath::max_speed() const {
  const Mat d = increments();
  return d.colwise().norm().maxCoeff() / h();
}

Vec PeriodicPath::value_at(double t) const {
  const int N = this->N();
  double s = std::fmod(t, T);
  if (s < 0.0) s += T;
  const double pos = s / h();
  int k = static_cast<int>(pos);
  if (k >= N) k = N - 1;
  const double theta = pos - k;
  return (1.0 - theta) * nodes.col(k) + theta * nodes.col((k + 1) % N);
}

PeriodicPath constant_path(const Vec& x, int N, double T) {
  if (N < 2) throw std::invalid_argument("constant_path: need N >= 2");
  if (!(T > 0.0)) throw std::invalid_argument("constant_path: period must be positive");
  PeriodicPath p;
  p.T = T;
  p.nodes = x.replicate(1, N);
  return p;
}

PeriodicPath resample(const PeriodicPath& path, int M) {
  if (M < 2) throw std::invalid_argument("resample: need M >= 2");
  PeriodicPath out;
  out.T = path.T;
  out.nodes.resize(path.dim(), M);
  const double h = path.T / M;
  for (int k = 0; k < M; ++k) out.nodes.col(k) = path.value_at(k * h);
  return out;
}

bool feasible(const PeriodicPath& path, double L, double eps_bd) {
  const double bound = (1.0 - eps_bd) * L;
  return path.max_speed() <= bound * (1.0 + 1e-12);
}

ProjectionResult project_feasible(const Mat& raw_nodes, double T, double L,
                                  double eps_bd, int max_iter, double tol) {
  if (raw_nodes.cols() < 2) throw std::invalid_argument("project_feasible: need >= 2 nodes");
  if (!(T > 0.0) || !(L > 0.0))
    throw std::invalid_argument("project_feasible: T and L must be positive");
  const int N = static_cast<int>(raw_nodes.cols());
  const int n = static_cast<int>(raw_nodes.rows());
  const double h = T / N;
  const double cap = (1.0 - eps_bd) * L * h;

  PeriodicPath out;
  out.T = T;
  out.nodes = raw_nodes;
  Mat d = out.increments();  // sums to zero by construction

  ProjectionResult res;
  if (d.colwise().norm().maxCoeff() <= cap) {
    res.path = std::move(out);
    res.converged = true;
    return res;
  }

  auto clip_balls = [&](Mat& m) {
    for (int k = 0; k < N; ++k) {
      const double nk = m.col(k).norm();
      if (nk > cap) m.col(k) *= cap / nk;
    }
  };

  // Dykstra between the product of increment balls and the zero-sum plane.
  // The plane is affine, so only the ball projection carries a correction.
  Mat x = d;
  Mat corr = Mat::Zero(n, N);
  const double scale = std::max(1.0, d.colwise().norm().maxCoeff());
  int it = 0;
  for (; it < max_iter; ++it) {
    Mat y = x + corr;
    Mat b = y;
    clip_balls(b);
    corr = y - b;
    Mat next = b.colwise() - Vec(b.rowwise().mean());
    const double move = (next - x).cwiseAbs().maxCoeff();
    x = std::move(next);
    if (move <= tol * scale && x.colwise().norm().maxCoeff() <= cap * (1.0 + 1e-12)) {
      ++it;
      break;
    }
  }
  // roundoff guard: re-center exactly, then rescale uniformly (a uniform
  // rescale keeps the zero sum, a per-ball clip would not)
  x.colwise() -= Vec(x.rowwise().mean());
  const double worst = x.colwise().norm().maxCoeff();
  if (worst > cap) x *= cap / worst;

  // rebuild nodes from increments, keeping the input's mean position
  Mat rebuilt(n, N);
  rebuilt.col(0).setZero();
  for (int k = 1; k < N; ++k) rebuilt.col(k) = rebuilt.col(k - 1) + x.col(k - 1);
  rebuilt.colwise() += Vec(raw_nodes.rowwise().mean() - rebuilt.rowwise().mean());

  res.path.T = T;
  res.path.nodes = std::move(rebuilt);
  res.iterations = it;
  res.converged = it < max_iter;
  return res;
}

PeriodicPath random_feasible(int n, int N, double T, double L, double amplitude,
                             std::uint64_t seed,
                             const std::optional<PeriodicPath>& base, double eps_bd) {
  if (base && (base->dim() != n || base->T != T))
    throw std::invalid_argument("random_feasible: base path does not match n, T");
  Rng rng(seed);
  const int modes = 3;
  std::vector<Vec> a(modes), b(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = amplitude / (m + 1) * rng.normal_vec(n);
    b[m] = amplitude / (m + 1) * rng.normal_vec(n);
  }
  Mat nodes(n, N);
  for (int k = 0; k < N; ++k) {
    const double t = k * T / N;
    Vec u = base ? base->value_at(t) : Vec(Vec::Zero(n));
    for (int m = 0; m < modes; ++m) {
      const double w = 2.0 * M_PI * (m + 1) * t / T;
      u += std::cos(w) * a[m] + std::sin(w) * b[m];
    }
    nodes.col(k) = u;
  }
  PeriodicPath p;
  p.T = T;
  p.nodes = std::move(nodes);
  const double target = 0.9 * (1.0 - eps_bd) * L;
  const double speed = p.max_speed();
  if (speed > target) {
    // shrink the oscillation about the mean until the speed target holds
    const Vec c = p.mean();
    p.nodes = ((target / speed) * (p.nodes.colwise() - c)).colwise() + c;
  }
  return project_feasible(p.nodes, T, L, eps_bd).path;
}

double path_distance(const PeriodicPath& a, const PeriodicPath& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("path_distance: dimension mismatch");
  if (std::abs(a.T - b.T) > 1e-12 * std::max(a.T, b.T))
    throw std::invalid_argument("path_distance: period mismatch");
  double best = 0.0;
  for (int k = 0; k < a.N(); ++k) {
    const double t = k * a.T / a.N();
    best = std::max(best, (a.nodes.col(k) - b.value_at(t)).norm());
  }
  for (int k = 0; k < b.N(); ++k) {
    const double t = k * b.T / b.N();
    best = std::max(best, (a.value_at(t) - b.nodes.col(k)).norm());
  }
  return best;
}

void write_path_csv(std::ostream& os, const PeriodicPath& path) {
  os << "t";
  for (int i = 1; i <= path.dim(); ++i) os << ",u_" << i;
  os << "\n";
  os << std::setprecision(17);
  for (int k = 0; k < path.N(); ++k) {
    os << k * path.T / path.N();
    for (int i = 0; i < path.dim(); ++i) os << "," << path.nodes(i, k);
    os << "\n";
  }
}

void write_path_csv_file(const std::string& filename, const PeriodicPath& path) {
  std::ofstream os(filename);
  if (!os) throw std::runtime_error("cannot open " + filename + " for writing");
  write_path_csv(os, path);
}

PeriodicPath read_path_csv(std::istream& is) {
  std::string line;
  // Leading '#' lines carry artifact metadata (embedded config) and are skipped.
  do {
    if (!std::getline(is, line)) throw std::runtime_error("path csv: empty input");
  } while (!line.empty() && line[0] == '#');
  if (line.rfind("t,u_1", 0) != 0)
    throw std::runtime_error("path csv: expected header starting with t,u_1");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error("path csv: need at least 2 rows");
  const std::size_t cols = rows.front().size();
  if (cols < 2) throw std::runtime_error("path csv: need at least one coordinate column");
  for (const auto& r : rows)
    if (r.size() != cols) throw std::runtime_error("path csv: ragged rows");

  const auto N = rows.size();
  const double h = rows[1][0] - rows[0][0];
  if (!(h > 0.0)) throw std::runtime_error("path csv: time column must increase");
  const double T = h * static_cast<double>(N);
  for (std::size_t k = 0; k < N; ++k)
    if (std::abs(rows[k][0] - static_cast<double>(k) * h) > 1e-9 * T)
      throw std::runtime_error("path csv: non-uniform time grid");

  PeriodicPath p;
  p.T = T;
  p.nodes.resize(static_cast<Eigen::Index>(cols - 1), static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 1; i < cols; ++i)
      p.nodes(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(k)) = rows[k][i];
  return p;
}

PeriodicPath read_path_csv_file(const std::string& filename) {
  std::ifstream is(filename);
  if (!is) throw std::runtime_error("cannot open " + filename);
  return read_path_csv(is);
}

}  // namespace relosc
