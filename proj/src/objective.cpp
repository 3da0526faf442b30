#include "extralab/objective.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

SmoothObjective::SmoothObjective(int agents, int dim, double smoothness, double strong_convexity)
    : agents_(agents), dim_(dim), smoothness_(smoothness), strong_convexity_(strong_convexity) {
  if (agents < 1 || dim < 1) throw ArgumentError("objective needs m >= 1 and n >= 1");
  if (!(strong_convexity >= 0.0) || !(smoothness >= strong_convexity)) {
    throw ArgumentError("objective constants must satisfy 0 <= mu <= L");
  }
}

void SmoothObjective::check_agent(int agent) const {
  if (agent < 0 || agent >= agents_) throw ArgumentError("agent index " + std::to_string(agent) + " out of range");
}

Eigen::VectorXd SmoothObjective::local_gradient(int agent, const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ArgumentError("gradient point has wrong dimension");
  Eigen::VectorXd out(dim_);
  local_gradient(agent, x, out);
  return out;
}

void stacked_gradient(const SmoothObjective& obj, const RowMatrix& x, RowMatrix& out) {
  if (x.rows() != obj.agents() || x.cols() != obj.dim()) {
    throw ArgumentError("stacked_gradient: iterate is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                        ", objective expects " + std::to_string(obj.agents()) + "x" + std::to_string(obj.dim()));
  }
  out.resize(x.rows(), x.cols());
  for (int i = 0; i < obj.agents(); ++i) obj.local_gradient(i, x.row(i).transpose(), out.row(i).transpose());
}

RowMatrix stacked_gradient(const SmoothObjective& obj, const RowMatrix& x) {
  RowMatrix out;
  stacked_gradient(obj, x, out);
  return out;
}

double global_value(const SmoothObjective& obj, const Eigen::VectorXd& x) {
  if (x.size() != obj.dim()) throw ArgumentError("global_value: wrong dimension");
  double total = 0.0;
  for (int i = 0; i < obj.agents(); ++i) total += obj.local_value(i, x);
  return total / obj.agents();
}

Eigen::VectorXd global_gradient(const SmoothObjective& obj, const Eigen::VectorXd& x) {
  if (x.size() != obj.dim()) throw ArgumentError("global_gradient: wrong dimension");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(obj.dim());
  Eigen::VectorXd g(obj.dim());
  for (int i = 0; i < obj.agents(); ++i) {
    obj.local_gradient(i, x, g);
    total += g;
  }
  return total / obj.agents();
}

// ---------------------------------------------------------------- least squares

LeastSquaresObjective::LeastSquaresObjective(LeastSquaresInstance instance)
    : SmoothObjective(instance.agents, instance.dim, smoothness_of(instance), instance.mu),
      instance_(std::move(instance)) {}

double LeastSquaresObjective::smoothness_of(const LeastSquaresInstance& inst) {
  if (static_cast<int>(inst.a.size()) != inst.agents || static_cast<int>(inst.b.size()) != inst.agents) {
    throw ArgumentError("least squares instance: agent count mismatch");
  }
  double top = 0.0;
  for (const auto& a : inst.a) {
    if (a.rows() != inst.dim || a.cols() != inst.samples) throw ArgumentError("least squares instance: bad A_i shape");
    // A'A shares its nonzero spectrum with AA' and is only s x s.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a, Eigen::EigenvaluesOnly);
    top = std::max(top, eig.eigenvalues().maxCoeff());
  }
  return top + inst.mu;
}

double LeastSquaresObjective::local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_agent(agent);
  const Eigen::VectorXd r = instance_.a[agent].transpose() * x - instance_.b[agent];
  return 0.5 * r.squaredNorm() + 0.5 * instance_.mu * x.squaredNorm();
}

void LeastSquaresObjective::local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                                           Eigen::Ref<Eigen::VectorXd> out) const {
  check_agent(agent);
  thread_local Eigen::VectorXd residual;
  const auto& a = instance_.a[agent];
  residual.resize(a.cols());
  residual.noalias() = a.transpose() * x;
  residual -= instance_.b[agent];
  out.noalias() = a * residual;
  out += instance_.mu * x;
}

std::optional<QuadraticModel> LeastSquaresObjective::quadratic_model() const {
  QuadraticModel q;
  const int n = dim();
  for (int i = 0; i < agents(); ++i) {
    const auto& a = instance_.a[i];
    q.hessians.push_back(a * a.transpose() + instance_.mu * Eigen::MatrixXd::Identity(n, n));
    q.linear.push_back(a * instance_.b[i]);
    q.offsets.push_back(0.5 * instance_.b[i].squaredNorm());
  }
  return q;
}

LeastSquaresInstance gen_least_squares_instance(int dim, int samples, int agents, double mu, std::uint64_t seed) {
  if (dim < 1 || samples < 1 || agents < 1) throw ArgumentError("least squares needs n, s, m >= 1");
  if (!(mu >= 0.0)) throw ArgumentError("ridge coefficient must be nonnegative");
  LeastSquaresInstance inst;
  inst.dim = dim;
  inst.samples = samples;
  inst.agents = agents;
  inst.mu = mu;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  inst.x_bar.resize(dim);
  for (int k = 0; k < dim; ++k) inst.x_bar(k) = gauss(rng);
  for (int i = 0; i < agents; ++i) {
    Eigen::MatrixXd a(dim, samples);
    for (int c = 0; c < samples; ++c) {
      for (int r = 0; r < dim; ++r) a(r, c) = unif(rng);
      const double norm = a.col(c).norm();
      // An all-zero draw has probability zero; keep the column unit anyway.
      if (norm > 0.0) {
        a.col(c) /= norm;
      } else {
        a.col(c).setZero();
        a(0, c) = 1.0;
      }
    }
    inst.b.push_back(a.transpose() * inst.x_bar);
    inst.a.push_back(std::move(a));
  }
  return inst;
}

std::shared_ptr<const LeastSquaresObjective> gen_least_squares(int dim, int samples, int agents, double mu,
                                                               std::uint64_t seed) {
  return std::make_shared<const LeastSquaresObjective>(gen_least_squares_instance(dim, samples, agents, mu, seed));
}

namespace {

void write_csv_file(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_csv(out, m);
}

Eigen::MatrixXd read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_matrix_csv(in);
}

}  // namespace

void save_instance(const std::filesystem::path& dir, const LeastSquaresInstance& inst) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < inst.agents; ++i) {
    write_csv_file(dir / ("A_" + std::to_string(i) + ".csv"), inst.a[i]);
    write_csv_file(dir / ("b_" + std::to_string(i) + ".csv"), inst.b[i]);
  }
  write_csv_file(dir / "x_bar.csv", inst.x_bar);
  std::ofstream meta(dir / "meta.txt");
  meta << "n=" << inst.dim << "\ns=" << inst.samples << "\nm=" << inst.agents << "\nmu=" << format_double(inst.mu)
       << "\nseed=" << inst.seed << '\n';
}

LeastSquaresInstance load_instance(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "meta.txt");
  if (!meta) throw std::runtime_error("cannot read " + (dir / "meta.txt").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"n", "s", "m", "mu", "seed"}) {
    if (!kv.count(key)) throw ValidationError(std::string("meta.txt missing key ") + key);
  }
  LeastSquaresInstance inst;
  inst.dim = std::stoi(kv["n"]);
  inst.samples = std::stoi(kv["s"]);
  inst.agents = std::stoi(kv["m"]);
  inst.mu = std::stod(kv["mu"]);
  inst.seed = std::stoull(kv["seed"]);
  for (int i = 0; i < inst.agents; ++i) {
    inst.a.push_back(read_csv_file(dir / ("A_" + std::to_string(i) + ".csv")));
    Eigen::MatrixXd b = read_csv_file(dir / ("b_" + std::to_string(i) + ".csv"));
    inst.b.emplace_back(Eigen::Map<Eigen::VectorXd>(b.data(), b.size()));
  }
  if (std::filesystem::exists(dir / "x_bar.csv")) {
    Eigen::MatrixXd xb = read_csv_file(dir / "x_bar.csv");
    inst.x_bar = Eigen::Map<Eigen::VectorXd>(xb.data(), xb.size());
  }
  return inst;
}

// ---------------------------------------------------------------- wrappers

RegularizedObjective::RegularizedObjective(ObjectivePtr base, double eps)
    : SmoothObjective(base->agents(), base->dim(), base->smoothness() + eps, base->strong_convexity() + eps),
      base_(std::move(base)),
      eps_(eps) {}

double RegularizedObjective::local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return base_->local_value(agent, x) + 0.5 * eps_ * x.squaredNorm();
}

void RegularizedObjective::local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                                          Eigen::Ref<Eigen::VectorXd> out) const {
  base_->local_gradient(agent, x, out);
  out += eps_ * x;
}

std::optional<QuadraticModel> RegularizedObjective::quadratic_model() const {
  auto q = base_->quadratic_model();
  if (!q) return q;
  for (auto& h : q->hessians) h.diagonal().array() += eps_;
  return q;
}

ShiftedObjective::ShiftedObjective(ObjectivePtr base, double tau, RowMatrix anchors)
    : SmoothObjective(base->agents(), base->dim(), base->smoothness() + tau, base->strong_convexity() + tau),
      base_(std::move(base)),
      tau_(tau),
      anchors_(std::move(anchors)) {}

double ShiftedObjective::local_value(int agent, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return base_->local_value(agent, x) + 0.5 * tau_ * (x - anchors_.row(agent).transpose()).squaredNorm();
}

void ShiftedObjective::local_gradient(int agent, const Eigen::Ref<const Eigen::VectorXd>& x,
                                      Eigen::Ref<Eigen::VectorXd> out) const {
  base_->local_gradient(agent, x, out);
  out += tau_ * (x - anchors_.row(agent).transpose());
}

std::optional<QuadraticModel> ShiftedObjective::quadratic_model() const {
  auto q = base_->quadratic_model();
  if (!q) return q;
  for (int i = 0; i < agents(); ++i) {
    const Eigen::VectorXd y = anchors_.row(i).transpose();
    q->hessians[i].diagonal().array() += tau_;
    q->linear[i] += tau_ * y;
    q->offsets[i] += 0.5 * tau_ * y.squaredNorm();
  }
  return q;
}

ObjectivePtr regularize(ObjectivePtr obj, double eps) {
  if (!obj) throw ArgumentError("regularize: null objective");
  if (!(eps > 0.0)) throw ArgumentError("regularize: eps must be positive");
  if (obj->strong_convexity() != 0.0) {
    std::cerr << "warning: regularizing an objective that is already strongly convex (mu="
              << obj->strong_convexity() << ")\n";
  }
  return std::make_shared<const RegularizedObjective>(std::move(obj), eps);
}

ObjectivePtr shift_proximal(ObjectivePtr obj, double tau, const RowMatrix& anchors) {
  if (!obj) throw ArgumentError("shift_proximal: null objective");
  if (!(tau > 0.0)) throw ArgumentError("shift_proximal: tau must be positive");
  if (anchors.rows() != obj->agents() || anchors.cols() != obj->dim()) {
    throw ArgumentError("shift_proximal: anchors must be " + std::to_string(obj->agents()) + "x" +
                        std::to_string(obj->dim()));
  }
  return std::make_shared<const ShiftedObjective>(std::move(obj), tau, anchors);
}

// ---------------------------------------------------------------- reference

RowMatrix ReferenceSolution::stacked_x_star() const {
  return x_star.transpose().replicate(grad_at_star.rows(), 1);
}

namespace {

Eigen::VectorXd direct_solve(const SmoothObjective& obj, const QuadraticModel& q) {
  const int n = obj.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < obj.agents(); ++i) {
    h += q.hessians[i];
    c += q.linear[i];
  }
  h /= obj.agents();
  c /= obj.agents();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(h);
  Eigen::VectorXd x = cod.solve(c);
  for (int pass = 0; pass < 2; ++pass) x += cod.solve(c - h * x);
  return x;
}

Eigen::VectorXd gradient_descent_solve(const SmoothObjective& obj, const ReferenceOptions& options) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(obj.dim());
  const double step = 1.0 / obj.smoothness();
  double residual = 0.0;
  for (long it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd g = global_gradient(obj, x);
    residual = g.norm();
    if (!std::isfinite(residual)) break;
    if (residual <= options.gradient_tolerance) return x;
    x -= step * g;
  }
  throw ReferenceSolveError("reference solve failed (gradient norm " + format_double(residual) + ")", residual);
}

}  // namespace

ReferenceSolution solve_reference(const SmoothObjective& obj, const ConsensusOperators& ops,
                                  const ReferenceOptions& options) {
  if (ops.u_pinv.rows() != obj.agents()) throw ArgumentError("solve_reference: operator size mismatch");
  ReferenceSolution ref;
  if (auto q = obj.quadratic_model()) {
    ref.x_star = direct_solve(obj, *q);
  } else {
    ref.x_star = gradient_descent_solve(obj, options);
  }
  const double stationarity = global_gradient(obj, ref.x_star).norm();
  const double scale = std::max(1.0, global_gradient(obj, Eigen::VectorXd::Zero(obj.dim())).norm());
  if (!(stationarity <= 1e-10 * scale)) {
    throw ReferenceSolveError("reference solve failed (gradient norm " + format_double(stationarity) + ")",
                              stationarity);
  }
  ref.f_star = global_value(obj, ref.x_star);
  const RowMatrix stacked = ref.x_star.transpose().replicate(obj.agents(), 1);
  ref.grad_at_star = stacked_gradient(obj, stacked);
  ref.lambda_star = -(ops.u_pinv * ref.grad_at_star);
  const double kkt = (ops.u_sqrt * ref.lambda_star + ref.grad_at_star).norm();
  if (!(kkt <= 1e-9 * std::max(1.0, ref.grad_at_star.norm()))) {
    throw ReferenceSolveError("reference solve failed (KKT residual " + format_double(kkt) + ")", kkt);
  }
  return ref;
}

ProblemRadii estimate_radii(const ReferenceSolution& ref, const RowMatrix& x0) {
  ProblemRadii r;
  r.r1 = ref.x_star.squaredNorm();
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    r.r1 = std::max(r.r1, (x0.row(i).transpose() - ref.x_star).squaredNorm());
  }
  for (Eigen::Index i = 0; i < ref.grad_at_star.rows(); ++i) {
    r.r2 = std::max(r.r2, ref.grad_at_star.row(i).squaredNorm());
  }
  return r;
}

}  // namespace extralab
