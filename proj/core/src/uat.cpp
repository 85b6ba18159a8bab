#include "cenn/uat.hpp"

#include "cenn/report.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <sstream>

namespace cenn {

namespace {

/// splitmix64 step, used to derive independent seeds from (seed, tag) pairs.
std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  return Matrix::NullaryExpr(rows, cols, [&] { return d(rng); });
}

double identity_weight(const FiniteCategory& c, ObjectIndex a) {
  const double mu = c.weight(c.identity(a));
  if (!(mu > 0.0))
    throw Error(ErrorKind::zero_weight, "uat",
                "identity-supported blocks need a positive weight on id_" + c.object_name(a), c.object_name(a));
  return mu;
}

}  // namespace

std::string to_string(TargetFamily f) { return f == TargetFamily::affine ? "affine" : "affine_tanh"; }

TargetFamily target_family_from_string(std::string_view s) {
  if (s == "affine") return TargetFamily::affine;
  if (s == "affine_tanh") return TargetFamily::affine_tanh;
  throw Error(ErrorKind::malformed_input, "uat", "unknown target family '" + std::string(s) + "'");
}

ObjectwiseMap random_objectwise_map(const FunctorPtr& x, const FunctorPtr& y, TargetFamily family,
                                    std::uint64_t seed, double scale) {
  const auto& c = x->category();
  ObjectMap<Matrix> w(c.object_count());
  ObjectMap<Vector> b(c.object_count());
  for (auto a : c.objects()) {
    Rng rng(mix(seed, idx(a)));
    const auto in = Eigen::Index(x->section_dim(a));
    const auto out = Eigen::Index(y->section_dim(a));
    w[a] = gaussian(out, in, rng, scale / std::sqrt(double(std::max<Eigen::Index>(in, 1))));
    b[a] = gaussian(out, 1, rng, 0.5 * scale);
  }
  auto m = ObjectwiseMap::affine(x, y, w, b);
  if (family == TargetFamily::affine_tanh)
    for (auto a : c.objects()) m.stages[a]->push_back(ActivationStage{Activation{ActivationKind::tanh}});
  return m;
}

NetworkSpec sample_equivariant_target(const Retraction& r, const FunctorPtr& x, std::uint64_t seed,
                                      TargetFamily family) {
  return compile_equivariant(r, random_objectwise_map(x, r.functor(), family, seed, 1.5), x);
}

// ---- constructive blocks ----

NetworkSpec build_carrier_block(const FunctorPtr& x, const ProbeFamily& sigma, const std::vector<Carrier>& carriers) {
  const auto& c = x->category();
  ObjectMap<std::size_t> count(c.object_count(), 0);
  for (const auto& car : carriers) ++count[c.tgt(car.arrow)];
  std::size_t k = 0;
  for (auto a : c.objects()) k = std::max(k, count[a]);
  auto s = share(FeatureFunctor::scalar(*x, k));
  CategoryKernel kern(x, s, Regime::unconstrained);
  kern.set_probe(sigma);
  ObjectMap<std::size_t> next(c.object_count(), 0);
  for (const auto& car : carriers) {
    const auto u = car.arrow;
    const auto a = c.tgt(u);
    const double mu = c.weight(u);
    if (!(mu > 0.0))
      throw Error(ErrorKind::zero_weight, "uat", "carrier arrow '" + c.arrow_id(u) + "' has zero weight",
                  c.arrow_id(u));
    if (car.ell.size() != Eigen::Index(x->fiber_dim(c.src(u))))
      throw Error(ErrorKind::shape_mismatch, "uat", "carrier covector does not match the fiber", c.arrow_id(u));
    const auto row = Eigen::Index(next[a]++);
    for (std::size_t y = 0; y < x->base_size(a); ++y) {
      const double eta = car.eta.size() ? car.eta(Eigen::Index(y)) : 1.0;
      kern.entry(u, y).row(row) += eta * car.ell.transpose() / mu;
    }
  }
  return NetworkSpec{x, {LiftLayer{x}, BundleConvLayer{std::move(kern), false}}};
}

NetworkSpec build_affine_block(const FunctorPtr& input, const FunctorPtr& output,
                               const ObjectMap<std::vector<Matrix>>& weight, const ObjectMap<Matrix>& bias) {
  const auto& c = input->category();
  CategoryKernel k(input, output, Regime::unconstrained);
  ObjectMap<Matrix> b(c.object_count());
  for (auto a : c.objects()) {
    const auto rows = Eigen::Index(output->fiber_dim(a));
    const auto cols = Eigen::Index(input->fiber_dim(a));
    const auto points = Eigen::Index(input->base_size(a));
    b[a] = bias[a].size() ? bias[a] : Matrix::Zero(points, rows);
    if (b[a].rows() != points || b[a].cols() != rows)
      throw Error(ErrorKind::shape_mismatch, "uat", "affine bias has the wrong shape", c.object_name(a));
    if (weight[a].empty()) continue;
    if (weight[a].size() != std::size_t(points))
      throw Error(ErrorKind::shape_mismatch, "uat", "affine block needs one weight per point", c.object_name(a));
    const double mu = identity_weight(c, a);
    for (std::size_t y = 0; y < weight[a].size(); ++y) {
      const Matrix& w = weight[a][y];
      if (w.rows() != rows || w.cols() != cols)
        throw Error(ErrorKind::shape_mismatch, "uat",
                    "affine weight is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) + ", expected " +
                        std::to_string(rows) + "x" + std::to_string(cols),
                    c.object_name(a));
      k.set_entry(c.identity(a), y, w / mu);
    }
  }
  k.set_bias(std::move(b));
  return NetworkSpec{input, {ConvLayer{std::move(k)}}};
}

NetworkSpec build_gate_mlp(const FunctorPtr& input, const std::vector<MlpLayer>& layers, const Activation& alpha,
                           bool passthrough) {
  const auto& c = input->category();
  std::size_t k = 0;  // passthrough width
  for (auto a : c.objects()) k = std::max(k, input->fiber_dim(a));
  NetworkSpec net{input, {}};
  FunctorPtr cur = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::size_t w = 0;
    for (auto a : c.objects()) w = std::max(w, std::size_t(layer.weight[a].rows()));
    const std::size_t p = passthrough ? k : 0;
    const std::size_t offset = passthrough && l > 0 ? k : 0;  // where the previous activations start
    auto pairs = share(FeatureFunctor::scalar(*input, p + 2 * w));
    auto proj = share(FeatureFunctor::scalar(*input, p + w));

    // Affine conv to [h; (1, z_1), …, (1, z_w)].
    ObjectMap<std::vector<Matrix>> aw(c.object_count());
    ObjectMap<Matrix> ab(c.object_count());
    for (auto a : c.objects()) {
      const auto n_in = Eigen::Index(cur->fiber_dim(a));
      const auto points = input->base_size(a);
      Matrix m = Matrix::Zero(Eigen::Index(p + 2 * w), n_in);
      Matrix bias = Matrix::Zero(Eigen::Index(points), Eigen::Index(p + 2 * w));
      if (p) m.topLeftCorner(Eigen::Index(p), Eigen::Index(p)).setIdentity();
      const Matrix& W = layer.weight[a];
      if (W.size() && W.cols() != n_in - Eigen::Index(offset))
        throw Error(ErrorKind::shape_mismatch, "uat", "MLP layer " + std::to_string(l) + " has the wrong input width",
                    c.object_name(a));
      for (Eigen::Index j = 0; j < W.rows(); ++j) {
        m.block(Eigen::Index(p) + 2 * j + 1, Eigen::Index(offset), 1, W.cols()) = W.row(j);
        bias.col(Eigen::Index(p) + 2 * j).setOnes();
        bias.col(Eigen::Index(p) + 2 * j + 1).setConstant(layer.bias[a](j));
      }
      aw[a].assign(points, m);
      ab[a] = bias;
    }
    net = chain_networks(net, build_affine_block(cur, pairs, aw, ab));

    // Block gate: pair j is scaled by α of its second entry.
    std::vector<GateBlock> blocks;
    for (std::size_t j = 0; j < w; ++j) blocks.push_back({p + 2 * j, 2, coordinate_channel(*pairs, p + 2 * j + 1)});
    net.layers.push_back(GateLayer{pairs, alpha, std::move(blocks)});

    // Projection keeping h and the first entry of each pair.
    ObjectMap<std::vector<Matrix>> pw(c.object_count());
    for (auto a : c.objects()) {
      Matrix m = Matrix::Zero(Eigen::Index(p + w), Eigen::Index(p + 2 * w));
      if (p) m.topLeftCorner(Eigen::Index(p), Eigen::Index(p)).setIdentity();
      for (std::size_t j = 0; j < w; ++j) m(Eigen::Index(p + j), Eigen::Index(p + 2 * j)) = 1.0;
      pw[a].assign(input->base_size(a), m);
    }
    net = chain_networks(net, build_affine_block(pairs, proj, pw, ObjectMap<Matrix>(c.object_count())));
    cur = proj;
  }
  return net;
}

NetworkSpec chain_networks(const NetworkSpec& first, const NetworkSpec& second) {
  if (first.output_is_bundle() || !same_functor(first.output(), second.input))
    throw Error(ErrorKind::type_mismatch, "uat", "fragments do not share a boundary functor");
  NetworkSpec out = first;
  out.layers.insert(out.layers.end(), second.layers.begin(), second.layers.end());
  return out;
}

// ---- per-object model ----

Matrix carrier_values(const FeatureFunctor& x, const ProbeFamily& sigma, const std::vector<Carrier>& carriers,
                      ObjectIndex b, const Matrix& feature) {
  const auto& c = x.category();
  const auto points = Eigen::Index(x.base_size(b));
  Matrix h(points, Eigen::Index(carriers.size()));
  for (std::size_t j = 0; j < carriers.size(); ++j) {
    const auto& car = carriers[j];
    if (c.tgt(car.arrow) != b)
      throw Error(ErrorKind::shape_mismatch, "uat", "carrier arrow does not end at the object", c.arrow_id(car.arrow));
    const Matrix moved = x.apply(car.arrow, feature);
    const auto& s = sigma.sigma[car.arrow];
    for (Eigen::Index y = 0; y < points; ++y) {
      const double eta = car.eta.size() ? car.eta(y) : 1.0;
      h(y, Eigen::Index(j)) = eta * car.ell.dot(moved.row(Eigen::Index(s[std::size_t(y)])).transpose());
    }
  }
  return h;
}

std::vector<Carrier> default_carriers(const FeatureFunctor& x, ObjectIndex b, std::size_t k, std::uint64_t seed) {
  const auto& c = x.category();
  std::vector<ArrowIndex> arrows{c.identity(b)};
  for (auto u : c.incoming(b))
    if (u != c.identity(b) && c.weight(u) > 0.0) arrows.push_back(u);
  std::vector<Carrier> out;
  for (auto u : arrows)
    for (std::size_t i = 0; i < x.fiber_dim(c.src(u)) && out.size() < k; ++i)
      out.push_back({u, Vector::Unit(Eigen::Index(x.fiber_dim(c.src(u))), Eigen::Index(i)), {}});
  Rng rng(mix(seed, idx(b)));
  for (std::size_t j = 0; out.size() < k; ++j) {
    const auto u = arrows[j % arrows.size()];
    const auto n = Eigen::Index(x.fiber_dim(c.src(u)));
    Vector ell = gaussian(n, 1, rng, 1.0);
    if (ell.norm() > 0.0) ell /= ell.norm();
    out.push_back({u, ell, {}});
  }
  return out;
}

namespace {

/// [h; α(W h + c); 1] for one point.
Vector head_features(const ObjectModel& m, const Activation& alpha, const Vector& h, Vector* z_out = nullptr) {
  const auto k = h.size();
  const auto w = m.hidden_weight.rows();
  Vector phi(k + w + 1);
  phi.head(k) = h;
  if (w) {
    const Vector z = m.hidden_weight * h + m.hidden_bias;
    phi.segment(k, w) = z.unaryExpr([&](double t) { return alpha(t); });
    if (z_out) *z_out = z;
  }
  phi(k + w) = 1.0;
  return phi;
}

}  // namespace

Matrix evaluate_head(const ObjectModel& m, const Activation& alpha, const Matrix& h) {
  const auto out_dim = m.readout.empty() ? 0 : m.readout.front().rows();
  Matrix out(h.rows(), out_dim);
  for (Eigen::Index y = 0; y < h.rows(); ++y)
    out.row(y) = (m.readout[std::size_t(y)] * head_features(m, alpha, h.row(y).transpose())).transpose();
  return out;
}

double object_loss(const ObjectModel& m, const Activation& alpha, const ObjectData& data, Vector* gradient) {
  const auto w = m.hidden_weight.rows();
  const auto k = m.hidden_weight.cols();
  Matrix gw = Matrix::Zero(w, k);
  Vector gb = Vector::Zero(w);
  std::vector<Matrix> gv;
  for (const auto& v : m.readout) gv.push_back(Matrix::Zero(v.rows(), v.cols()));
  const double n = double(std::max<std::size_t>(data.carriers.size(), 1));
  double loss = 0.0;
  for (std::size_t s = 0; s < data.carriers.size(); ++s) {
    const Matrix& h = data.carriers[s];
    for (Eigen::Index y = 0; y < h.rows(); ++y) {
      Vector z;
      const Vector hy = h.row(y).transpose();
      const Vector phi = head_features(m, alpha, hy, &z);
      const Matrix& v = m.readout[std::size_t(y)];
      const Vector r = v * phi - data.targets[s].row(y).transpose();
      loss += 0.5 * r.squaredNorm() / n;
      if (!gradient) continue;
      gv[std::size_t(y)] += r * phi.transpose() / n;
      if (w) {
        const Vector ga = v.middleCols(k, w).transpose() * r / n;
        const Vector gz = ga.cwiseProduct(z.unaryExpr([&](double t) { return alpha.derivative(t); }));
        gw += gz * hy.transpose();
        gb += gz;
      }
    }
  }
  if (gradient) {
    ObjectModel g = m;
    g.hidden_weight = gw;
    g.hidden_bias = gb;
    g.readout = gv;
    *gradient = object_parameters(g);
  }
  return loss;
}

Vector object_residuals(const ObjectModel& m, const Activation& alpha, const ObjectData& data, Matrix* jacobian) {
  const auto w = m.hidden_weight.rows();
  const auto k = m.hidden_weight.cols();
  const auto n_out = m.readout.empty() ? 0 : m.readout.front().rows();
  const auto cols = m.readout.empty() ? 0 : m.readout.front().cols();
  const auto points = Eigen::Index(m.readout.size());
  const auto samples = Eigen::Index(data.carriers.size());
  const double scale = 1.0 / std::sqrt(double(std::max<Eigen::Index>(samples, 1)));
  const auto n_params = w * k + w + points * n_out * cols;
  Vector r(samples * points * n_out);
  if (jacobian) *jacobian = Matrix::Zero(r.size(), n_params);
  Eigen::Index row = 0;
  for (Eigen::Index s = 0; s < samples; ++s)
    for (Eigen::Index y = 0; y < points; ++y) {
      Vector z;
      const Vector hy = data.carriers[std::size_t(s)].row(y).transpose();
      const Vector phi = head_features(m, alpha, hy, &z);
      const Matrix& v = m.readout[std::size_t(y)];
      const Vector dz = w ? Vector(z.unaryExpr([&](double t) { return alpha.derivative(t); })) : Vector();
      for (Eigen::Index o = 0; o < n_out; ++o, ++row) {
        r(row) = scale * (v.row(o).dot(phi) - data.targets[std::size_t(s)](y, o));
        if (!jacobian) continue;
        auto jr = jacobian->row(row);
        for (Eigen::Index q = 0; q < w; ++q) {
          const double c = scale * v(o, k + q) * dz(q);
          for (Eigen::Index i = 0; i < k; ++i) jr(q + i * w) = c * hy(i);  // column-major W
          jr(w * k + q) = c;
        }
        const auto base = w * k + w + y * n_out * cols;
        for (Eigen::Index col = 0; col < cols; ++col) jr(base + o + col * n_out) = scale * phi(col);
      }
    }
  return r;
}

Vector object_parameters(const ObjectModel& m) {
  Eigen::Index n = m.hidden_weight.size() + m.hidden_bias.size();
  for (const auto& v : m.readout) n += v.size();
  Vector theta(n);
  Eigen::Index i = 0;
  auto put = [&](const Matrix& a) {
    theta.segment(i, a.size()) = Eigen::Map<const Vector>(a.data(), a.size());
    i += a.size();
  };
  put(m.hidden_weight);
  put(m.hidden_bias);
  for (const auto& v : m.readout) put(v);
  return theta;
}

void set_object_parameters(ObjectModel& m, const Vector& theta) {
  Eigen::Index i = 0;
  auto take = [&](auto& a) {
    Eigen::Map<Vector>(a.data(), a.size()) = theta.segment(i, a.size());
    i += a.size();
  };
  take(m.hidden_weight);
  take(m.hidden_bias);
  for (auto& v : m.readout) take(v);
  if (i != theta.size()) throw Error(ErrorKind::shape_mismatch, "uat", "parameter vector has the wrong length");
}

void solve_readouts(ObjectModel& m, const Activation& alpha, const ObjectData& data) {
  const auto n = Eigen::Index(data.carriers.size());
  for (std::size_t y = 0; y < m.readout.size(); ++y) {
    auto& v = m.readout[y];
    if (n == 0) {
      v.setZero();
      continue;
    }
    Matrix design(n, v.cols());
    Matrix target(n, v.rows());
    for (Eigen::Index s = 0; s < n; ++s) {
      design.row(s) = head_features(m, alpha, data.carriers[std::size_t(s)].row(Eigen::Index(y)).transpose()).transpose();
      target.row(s) = data.targets[std::size_t(s)].row(Eigen::Index(y));
    }
    v = design.completeOrthogonalDecomposition().solve(target).transpose();
  }
}

// ---- fitting ----

std::vector<UatArchitecture> default_capacity_grid() {
  std::vector<UatArchitecture> grid;
  for (std::size_t k : {1, 2, 4, 8})
    for (std::size_t w : {0, 4, 8}) grid.push_back({k, w});
  return grid;
}

NetworkSpec assemble_fitted_network(const UatProblem& p, const ObjectMap<ObjectModel>& models) {
  const auto& x = p.x;
  const auto& c = x->category();
  const auto& y = p.retraction.functor();
  std::vector<Carrier> carriers;
  std::size_t k = 0;
  std::size_t w = 0;
  for (auto b : c.objects()) {
    carriers.insert(carriers.end(), models[b].carriers.begin(), models[b].carriers.end());
    k = std::max(k, models[b].carriers.size());
    w = std::max(w, std::size_t(models[b].hidden_weight.rows()));
  }
  NetworkSpec frag = build_carrier_block(x, p.sigma, carriers);
  const auto s = frag.output();
  if (w) {
    MlpLayer layer{ObjectMap<Matrix>(c.object_count()), ObjectMap<Vector>(c.object_count())};
    for (auto b : c.objects()) {
      layer.weight[b] = models[b].hidden_weight;
      layer.bias[b] = models[b].hidden_bias;
    }
    frag = chain_networks(frag, build_gate_mlp(s, {layer}, p.alpha, true));
  }
  ObjectMap<std::vector<Matrix>> rw(c.object_count());
  ObjectMap<Matrix> rb(c.object_count());
  for (auto b : c.objects()) {
    const auto& m = models[b];
    rb[b] = Matrix::Zero(Eigen::Index(x->base_size(b)), Eigen::Index(y->fiber_dim(b)));
    for (std::size_t pt = 0; pt < m.readout.size(); ++pt) {
      const Matrix& v = m.readout[pt];
      rw[b].push_back(v.leftCols(v.cols() - 1));
      rb[b].row(Eigen::Index(pt)) = v.col(v.cols() - 1).transpose();
    }
  }
  frag = chain_networks(frag, build_affine_block(frag.output(), y, rw, rb));
  ObjectwiseMap g(x, y);
  auto shared = std::make_shared<const NetworkSpec>(std::move(frag));
  for (auto b : c.objects()) g.stages[b] = std::vector<Stage>{FragmentStage{shared}};
  return compile_equivariant(p.retraction, g, x);
}

namespace {

struct ObjectFit {
  ObjectModel model;
  double loss = 0.0;
  std::size_t iterations = 0;
  std::string status;
};

ObjectFit fit_object(const FeatureFunctor& x, const FunctorPtr& y, ObjectIndex b, const ProbeFamily& sigma,
                     const std::vector<Matrix>& inputs, const std::vector<Matrix>& targets, const UatArchitecture& arch,
                     const Activation& alpha, const FitBudget& budget, std::uint64_t seed) {
  ObjectFit fit;
  auto& m = fit.model;
  m.carriers = default_carriers(x, b, arch.carriers, seed);
  const auto k = Eigen::Index(m.carriers.size());
  const auto w = Eigen::Index(arch.width);
  Rng rng(mix(mix(seed, idx(b)), 1000 + arch.carriers * 31 + arch.width));
  m.hidden_weight = gaussian(w, k, rng, 1.0 / std::sqrt(double(std::max<Eigen::Index>(k, 1))));
  m.hidden_bias = gaussian(w, 1, rng, 0.5);
  m.readout.assign(x.base_size(b), Matrix::Zero(Eigen::Index(y->fiber_dim(b)), k + w + 1));

  ObjectData data;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    data.carriers.push_back(carrier_values(x, sigma, m.carriers, b, inputs[s]));
    data.targets.push_back(targets[s]);
  }
  solve_readouts(m, alpha, data);
  fit.loss = object_loss(m, alpha, data, nullptr);
  fit.status = "converged";
  if (w == 0) return fit;  // readouts alone: the least-squares solution is exact

  double lambda = budget.damping;
  fit.status = "budget_exhausted";
  for (; fit.iterations < budget.iterations; ++fit.iterations) {
    if (fit.loss < budget.tol) {
      fit.status = "tolerance";
      break;
    }
    if (lambda > 1e10) {
      fit.status = "stalled";  // no damped step decreases the loss: a local minimum
      break;
    }
    Matrix j;
    const Vector r = object_residuals(m, alpha, data, &j);
    const Matrix jtj = j.transpose() * j;
    const Vector g = j.transpose() * r;
    Matrix lhs = jtj;
    lhs.diagonal() += lambda * (jtj.diagonal().array() + 1e-9).matrix();
    const Vector delta = lhs.ldlt().solve(-g);
    ObjectModel trial = m;
    set_object_parameters(trial, object_parameters(m) + delta);
    solve_readouts(trial, alpha, data);
    const double tl = object_loss(trial, alpha, data, nullptr);
    if (tl < fit.loss) {
      const bool tiny = fit.loss - tl <= 1e-15 * fit.loss;
      m = std::move(trial);
      fit.loss = tl;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (tiny) {
        fit.status = "converged";
        ++fit.iterations;
        break;
      }
    } else {
      lambda *= 4.0;
    }
  }
  return fit;
}

}  // namespace

FitResult fit_cenn(const UatProblem& p, const std::vector<UatArchitecture>& grid, const FitBudget& budget,
                   std::uint64_t seed, std::size_t eqv_samples) {
  const auto& x = *p.x;
  const auto& c = x.category();
  const auto& y = p.retraction.functor();
  p.target.typecheck();

  // Transported samples per object and the target's values on them.
  ObjectMap<std::vector<Matrix>> inputs(c.object_count()), targets(c.object_count());
  for (const auto& s : p.samples)
    for (auto a : c.objects()) {
      if (!s.has(a)) continue;
      for (auto u : c.incoming(a)) {
        if (c.weight(u) == 0.0) continue;
        const auto b = c.src(u);
        Matrix t = x.apply(u, s.at(a));
        targets[b].push_back(network_forward(p.target, b, t));
        inputs[b].push_back(std::move(t));
      }
    }
  const auto eqv = random_sections(p.x, eqv_samples, mix(seed, 77));

  FitResult result;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    ObjectMap<ObjectModel> models(c.object_count());
    FitPoint pt;
    pt.arch = grid[i];
    pt.converged = true;
    pt.status = "converged";
    for (auto b : c.objects()) {
      auto f = fit_object(x, y, b, p.sigma, inputs[b], targets[b], grid[i], p.alpha, budget, seed);
      pt.train_loss = std::max(pt.train_loss, f.loss);
      pt.iterations = std::max(pt.iterations, f.iterations);
      // Worst status wins: budget_exhausted, stalled, tolerance, converged.
      static const std::vector<std::string> rank{"converged", "tolerance", "stalled", "budget_exhausted"};
      if (std::ranges::find(rank, f.status) > std::ranges::find(rank, pt.status)) pt.status = f.status;
      if (f.status == "budget_exhausted") pt.converged = false;
      models[b] = std::move(f.model);
    }
    auto psi = assemble_fitted_network(p, models);
    pt.sup_error = max_difference(p.target, psi, p.samples);
    pt.eqv_residual = check_equivariance(psi, eqv).max_residual;
    if (pt.sup_error < best) {
      best = pt.sup_error;
      result.best = i;
    }
    pt.best_error = best;
    pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.curve.push_back(pt);
    result.networks.push_back(std::move(psi));
  }
  return result;
}

double gradient_check(const UatArchitecture& arch, const Activation& alpha, std::size_t output_dim,
                      std::size_t base_points, std::size_t points, std::uint64_t seed, double step) {
  const auto k = Eigen::Index(arch.carriers);
  const auto w = Eigen::Index(arch.width);
  const auto pts = Eigen::Index(base_points);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < points; ++trial) {
    Rng rng(mix(seed, trial));
    ObjectModel m;
    m.hidden_weight = gaussian(w, k, rng, 1.0);
    m.hidden_bias = gaussian(w, 1, rng, 1.0);
    for (Eigen::Index y = 0; y < pts; ++y) m.readout.push_back(gaussian(Eigen::Index(output_dim), k + w + 1, rng, 1.0));
    ObjectData data;
    for (int s = 0; s < 8; ++s) {
      data.carriers.push_back(gaussian(pts, k, rng, 1.0));
      data.targets.push_back(gaussian(pts, Eigen::Index(output_dim), rng, 1.0));
    }
    Vector g;
    object_loss(m, alpha, data, &g);
    const Vector theta = object_parameters(m);
    Vector fd(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      ObjectModel mp = m, mm = m;
      Vector tp = theta, tm = theta;
      tp(i) += step;
      tm(i) -= step;
      set_object_parameters(mp, tp);
      set_object_parameters(mm, tm);
      fd(i) = (object_loss(mp, alpha, data, nullptr) - object_loss(mm, alpha, data, nullptr)) / (2.0 * step);
    }
    const double scale = std::max({g.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1e-12});
    worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// ---- reporting ----

UatReport uat_report(const std::vector<UatExperiment>& experiments) {
  Table csv{{"experiment", "carriers", "width", "sup_error", "best_error", "eqv_residual", "train_loss", "iterations",
             "status", "seed", "samples"},
            {}};
  std::ostringstream md;
  md << "# Approximation report\n\n";
  md << "Errors are max over objects and sampled sections of the sup-norm gap between target and fitted network, "
        "measured in the standard coordinate basis (basis constant 1). `best_error` is the monotone-best curve.\n";
  for (const auto& e : experiments) {
    Table t{{"carriers", "width", "sup_error", "best_error", "eqv_residual", "status", "seconds"}, {}};
    for (const auto& pt : e.result.curve) {
      csv.add({e.name, std::to_string(pt.arch.carriers), std::to_string(pt.arch.width), format_number(pt.sup_error),
               format_number(pt.best_error), format_number(pt.eqv_residual), format_number(pt.train_loss),
               std::to_string(pt.iterations), pt.status, std::to_string(e.seed), std::to_string(e.sample_count)});
      char secs[32];
      std::snprintf(secs, sizeof secs, "%.3f", pt.seconds);
      t.add({std::to_string(pt.arch.carriers), std::to_string(pt.arch.width), format_number(pt.sup_error),
             format_number(pt.best_error), format_number(pt.eqv_residual), pt.status, secs});
    }
    md << "\n## " << e.name << "\n\nseed " << e.seed << ", " << e.sample_count << " samples per compact\n\n"
       << t.to_markdown();
  }
  return {csv.to_csv(), md.str()};
}

}  // namespace cenn
