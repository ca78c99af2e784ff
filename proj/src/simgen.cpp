#include "tailclust/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tailclust/dist_fn.hpp"
#include "tailclust/error.hpp"

namespace tailclust {

double CounterStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace sim {

namespace {

// Probabilities handed to quantile transforms stay this far from {0, 1}.
constexpr double kProbFloor = 0x1.0p-53;

double clamp_prob(double u) { return std::clamp(u, kProbFloor, 1.0 - kProbFloor); }

// Uniform on (0,1) that already respects the clamp (the stream never returns 0 or 1).
double draw_uniform(CounterStream& s) { return clamp_prob(s.uniform()); }

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::A: return "A";
    case Model::B: return "B";
    case Model::C: return "C";
    case Model::D: return "D";
    case Model::A_F: return "A-F";
    case Model::B_F: return "B-F";
    case Model::EXACT_PARETO: return "EXACT_PARETO";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  if (up == "A") return Model::A;
  if (up == "B") return Model::B;
  if (up == "C") return Model::C;
  if (up == "D") return Model::D;
  if (up == "A_F") return Model::A_F;
  if (up == "B_F") return Model::B_F;
  if (up == "EXACT_PARETO") return Model::EXACT_PARETO;
  throw InvalidArgument("unknown simulation model '" + std::string(name) +
                        "' (expected A, B, C, D, A-F, B-F or EXACT_PARETO)");
}

bool is_published_design(Model m) noexcept { return m != Model::EXACT_PARETO; }

bool uses_copula(Model m) noexcept {
  return m == Model::B || m == Model::C || m == Model::D || m == Model::B_F;
}

void SimModelSpec::validate() const {
  if (g < 1) throw InvalidArgument("simulation needs g >= 1");
  if (q < 1) throw InvalidArgument("simulation needs q >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("simulation delta must lie in (0,1)");
  if (n < 2) throw InvalidArgument("simulation needs n >= 2");
}

nlohmann::json to_json(const SimModelSpec& spec) {
  return {{"model", to_string(spec.model)},
          {"published_design", is_published_design(spec.model)},
          {"g", spec.g},
          {"q", spec.q},
          {"delta", spec.delta},
          {"n", spec.n},
          {"seed", spec.seed}};
}

SimModelSpec spec_from_json(const nlohmann::json& doc) {
  SimModelSpec spec;
  spec.model = parse_model(doc.at("model").get<std::string>());
  spec.g = doc.at("g").get<std::size_t>();
  spec.q = doc.at("q").get<std::size_t>();
  spec.delta = doc.at("delta").get<double>();
  spec.n = doc.at("n").get<std::size_t>();
  spec.seed = doc.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

ScaleMatrix build_scale_matrix(Model model, std::size_t p) {
  if (p < 1) throw InvalidArgument("scale matrix needs p >= 1");
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd sigma(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto lag = static_cast<double>(std::abs(i - j));
      switch (model) {
        case Model::B:
        case Model::B_F: sigma(i, j) = std::pow(0.5, lag); break;
        case Model::C: sigma(i, j) = (i == j) ? 1.0 : 0.5; break;
        case Model::D: sigma(i, j) = std::pow(-0.5, lag); break;
        default: throw InvalidArgument("model " + to_string(model) + " has no scale matrix");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw Error("Cholesky factorisation failed for the " + to_string(model) + " scale matrix (p=" +
                std::to_string(p) + ")");
  }
  return {sigma, llt.matrixL()};
}

Eigen::MatrixXd sample_mv_cauchy(const ScaleMatrix& scale, std::size_t n, const std::function<double()>& next_normal) {
  const Eigen::Index p = scale.chol.rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = next_normal();
    const double w = std::fabs(next_normal());
    out.row(i) = (scale.chol.triangularView<Eigen::Lower>() * z).transpose() / w;
  }
  return out;
}

Eigen::MatrixXd sample_mv_cauchy(const ScaleMatrix& scale, std::size_t n, CounterStream& stream) {
  return sample_mv_cauchy(scale, n, [&stream] { return stream.normal(); });
}

Sample generate(const SimModelSpec& spec, const std::optional<ScaleMatrix>& scale_override) {
  spec.validate();
  GroundTruth truth = truth_from_design(spec.g, spec.q, spec.delta);
  const std::size_t n = spec.n;
  const std::size_t p = spec.p();
  std::vector<double> values(n * p);

  if (uses_copula(spec.model)) {
    const ScaleMatrix scale = scale_override ? *scale_override : build_scale_matrix(spec.model, p);
    if (static_cast<std::size_t>(scale.chol.rows()) != p) throw InvalidArgument("scale matrix dimension differs from p");
    CounterStream stream(spec.seed, 0);
    const Eigen::MatrixXd latent = sample_mv_cauchy(scale, n, stream);
    for (std::size_t j = 0; j < p; ++j) {
      const double gamma = truth.gamma_of_column(j);
      double* dst = values.data() + j * n;
      if (spec.model == Model::B_F) {
        // Fr^{-1}(St_1(x)), evaluated from whichever tail of St_1 is small.
        for (std::size_t i = 0; i < n; ++i) {
          const double x = latent(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          dst[i] = x > 0.0 ? dist::frechet_isf(clamp_prob(dist::cauchy_sf(x)), gamma)
                           : dist::frechet_quantile(clamp_prob(dist::cauchy_sf(-x)), gamma);
        }
      } else {
        // |St_v^{-1}(St_1(x))| = St_v^{-1} at upper tail St_1-tail(|x|), by symmetry.
        const dist::StudentT law(1.0 / gamma);
        for (std::size_t i = 0; i < n; ++i) {
          const double x = std::fabs(latent(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
          const double tail = std::min(0.5, clamp_prob(dist::cauchy_sf(x)));
          dst[i] = tail >= 0.5 ? 0.0 : law.isf(tail);
        }
      }
    }
  } else {
    for (std::size_t j = 0; j < p; ++j) {
      const double gamma = truth.gamma_of_column(j);
      CounterStream stream(spec.seed, j + 1);
      double* dst = values.data() + j * n;
      switch (spec.model) {
        case Model::A: {
          const dist::StudentT law(1.0 / gamma);
          // |T| quantile at u is the St_v quantile at (1+u)/2, i.e. upper tail (1-u)/2.
          for (std::size_t i = 0; i < n; ++i) dst[i] = law.isf(0.5 * (1.0 - draw_uniform(stream)));
          break;
        }
        case Model::A_F:
          for (std::size_t i = 0; i < n; ++i) dst[i] = dist::frechet_quantile(draw_uniform(stream), gamma);
          break;
        case Model::EXACT_PARETO:
          for (std::size_t i = 0; i < n; ++i) dst[i] = std::pow(draw_uniform(stream), -gamma);
          break;
        default: break;
      }
    }
  }
  return {DataMatrix(n, p, std::move(values)), std::move(truth)};
}

}  // namespace sim
}  // namespace tailclust
