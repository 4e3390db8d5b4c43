#include "core/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/modulus.hpp"
#include "core/parallel.hpp"

namespace condmean {

TailEstimate make_tail_estimate(std::uint64_t hits, std::uint64_t trials) {
  require(trials > 0 && hits <= trials, ErrorCode::invalid_argument,
          "tail estimate needs 0 <= hits <= trials, trials > 0");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  TailEstimate e;
  e.trials = trials;
  e.hits = hits;
  e.p_hat = static_cast<double>(hits) / n;
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / n);
  const double z2n = z * z / n;
  const double centre = (e.p_hat + 0.5 * z2n) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) *
      std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z * z / (4.0 * n * n));
  e.ci95_lo = std::clamp(std::min(centre - half, e.p_hat), 0.0, 1.0);
  e.ci95_hi = std::clamp(std::max(centre + half, e.p_hat), 0.0, 1.0);
  return e;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::uniform_exact: return "uniform-exact";
    case Mode::smooth_numeric: return "smooth-numeric";
    case Mode::gaussian_closed_form: return "gaussian-closed-form";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::uniform_exact, Mode::smooth_numeric, Mode::gaussian_closed_form})
    if (name == mode_name(m)) return m;
  return std::nullopt;
}

double ExperimentConfig::event_threshold() const {
  if (delta) return s / *delta;
  return std::pow(s, 1.0 - *alpha);
}

void ExperimentConfig::validate() const {
  require(n >= 2, ErrorCode::invalid_argument, "n must be at least 2");
  require(trials >= 100, ErrorCode::invalid_argument, "trials must be at least 100");
  require(std::isfinite(s) && s > 0.0, ErrorCode::invalid_argument, "s must be positive");
  require(delta.has_value() != alpha.has_value(), ErrorCode::invalid_argument,
          "exactly one of delta and alpha must be set");
  if (delta)
    require(std::isfinite(*delta) && *delta > 0.0, ErrorCode::invalid_argument,
            "delta must be positive");
  if (alpha)
    require(*alpha > 0.0 && *alpha < 1.0, ErrorCode::invalid_argument,
            "alpha must lie in (0, 1)");
  const bool consistent =
      (mode == Mode::uniform_exact && law.kind() == LawKind::uniform) ||
      (mode == Mode::smooth_numeric && law.kind() == LawKind::smooth) ||
      (mode == Mode::gaussian_closed_form && law.kind() == LawKind::gaussian);
  require(consistent, ErrorCode::invalid_argument, "mode is inconsistent with the law");
  if (mode == Mode::smooth_numeric)
    require(grid >= kMinSmoothGrid, ErrorCode::invalid_argument,
            "smooth-numeric grid must be >= 256");
}

namespace {

std::vector<double> box_offsets(const DensitySpec& law, std::size_t n) {
  return std::vector<double>(n, law.as_uniform() ? law.as_uniform()->offset : 0.0);
}

double box_side(const DensitySpec& law) {
  if (auto u = law.as_uniform()) return u->ell;
  return law.as_smooth()->ell();
}

template <class Event>
std::uint64_t count_hits(const ExperimentConfig& cfg, unsigned workers, Event event) {
  auto partials = run_chunks<std::uint64_t>(
      cfg.trials, workers,
      [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
        Sampler sampler(cfg.law, cfg.seed, chunk);
        std::vector<double> x(cfg.n);
        std::uint64_t hits = 0;
        for (std::uint64_t k = 0; k < count; ++k) {
          sampler.fill(x);
          if (event(std::span<const double>(x))) ++hits;
        }
        return hits;
      });
  return std::accumulate(partials.begin(), partials.end(), std::uint64_t{0});
}

}  // namespace

TailEstimate estimate_modulus_tail(const ExperimentConfig& cfg, unsigned workers) {
  cfg.validate();
  const double threshold = cfg.event_threshold();
  const ModulusQuery query{cfg.s, cfg.clamp};
  const std::size_t n = cfg.n;

  if (cfg.mode == Mode::gaussian_closed_form) {
    // The Gaussian modulus does not depend on the fluctuations, so every
    // trial returns the same value.
    const double nu =
        modulus_gaussian(n, cfg.s, cfg.law.as_gaussian()->variance).exact;
    TailEstimate e = make_tail_estimate(nu > threshold ? cfg.trials : 0, cfg.trials);
    e.oracle = nu > threshold ? 1.0 : 0.0;
    return e;
  }

  std::uint64_t hits = 0;
  if (cfg.mode == Mode::uniform_exact) {
    const UniformLaw& law = *cfg.law.as_uniform();
    const std::vector<double> offsets = box_offsets(cfg.law, n);
    hits = count_hits(cfg, workers, [&](std::span<const double> x) {
      const FiberGeometry g = fiber_length_cube(x, law.ell, offsets);
      return modulus_uniform_exact(g, query, n).value(cfg.clamp) > threshold;
    });
    TailEstimate e = make_tail_estimate(hits, cfg.trials);
    // clamped nu never exceeds 1
    if (cfg.clamp && threshold >= 1.0) {
      e.oracle = 0.0;
    } else {
      const double r = std::sqrt(static_cast<double>(n)) * cfg.s / threshold;
      e.oracle = fiber_length_tail_exact_uniform(n, law.ell, r);
    }
    return e;
  }

  hits = count_hits(cfg, workers, [&](std::span<const double> x) {
    return modulus_smooth_numeric(x, cfg.law, query, cfg.grid).value(cfg.clamp) > threshold;
  });
  return make_tail_estimate(hits, cfg.trials);
}

TailEstimate estimate_fiber_tail(const ExperimentConfig& cfg, double r, unsigned workers) {
  require(std::isfinite(r) && r >= 0.0, ErrorCode::invalid_argument, "r must be >= 0");
  require(cfg.n >= 2 && cfg.trials >= 100, ErrorCode::invalid_argument,
          "need n >= 2 and trials >= 100");
  require(cfg.law.bounded_support(), ErrorCode::invalid_argument,
          "fiber tail needs a law with bounded support");
  const double ell = box_side(cfg.law);
  const std::vector<double> offsets = box_offsets(cfg.law, cfg.n);
  const std::uint64_t hits = count_hits(cfg, workers, [&](std::span<const double> x) {
    return fiber_length_cube(x, ell, offsets).length < r;
  });
  TailEstimate e = make_tail_estimate(hits, cfg.trials);
  if (cfg.law.as_uniform()) e.oracle = fiber_length_tail_exact_uniform(cfg.n, ell, r);
  return e;
}

PartitionSpec::PartitionSpec(std::vector<double> cut_points) : cuts_(std::move(cut_points)) {
  require(cuts_.size() >= 2, ErrorCode::invalid_argument,
          "partition needs at least two cut points");
  for (std::size_t k = 0; k + 1 < cuts_.size(); ++k)
    require(std::isfinite(cuts_[k]) && std::isfinite(cuts_[k + 1]) &&
                cuts_[k] < cuts_[k + 1],
            ErrorCode::invalid_argument, "cut points must be finite and increasing");
}

PartitionSpec PartitionSpec::random(Stream& stream, std::size_t intervals, double lo,
                                    double hi) {
  require(intervals >= 1 && lo < hi, ErrorCode::invalid_argument, "bad random partition");
  std::vector<double> cuts{lo, hi};
  while (cuts.size() < intervals + 1) {
    const double c = lo + (hi - lo) * stream.uniform_open();
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  return PartitionSpec(std::move(cuts));
}

bool PartitionSpec::covers(const DensitySpec& law) const {
  return law.bounded_support() && cuts_.front() <= law.support_lo() &&
         cuts_.back() >= law.support_hi();
}

double MuRule::operator()(std::span<const double> x, double xi) const {
  if (kind == Kind::constant) return value;
  std::vector<double> eta(x.begin(), x.end());
  for (double& e : eta) e -= xi;
  const std::size_t mid = eta.size() / 2;
  std::nth_element(eta.begin(), eta.begin() + mid, eta.end());
  double median = eta[mid];
  if (eta.size() % 2 == 0)
    median = 0.5 * (median + *std::max_element(eta.begin(), eta.begin() + mid));
  return median + value;
}

namespace {

bool in_window(std::span<const double> x, const MuRule& mu, double s) {
  const double xi = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double left = mu(x, xi);
  return xi >= left && xi <= left + s;
}

}  // namespace

PartitionReport estimate_local_partition(const ExperimentConfig& cfg,
                                         const PartitionSpec& partition,
                                         const MuRule& mu, unsigned workers) {
  require(cfg.n >= 1 && cfg.trials >= 100, ErrorCode::invalid_argument,
          "need n >= 1 and trials >= 100");
  require(std::isfinite(cfg.s) && cfg.s >= 0.0, ErrorCode::invalid_argument,
          "s must be nonnegative");
  require(partition.covers(cfg.law), ErrorCode::invalid_argument,
          "partition must cover the (bounded) support of the law");
  const std::size_t k_count = partition.intervals();
  const std::size_t n = cfg.n;
  double boxes_total = 1.0;
  for (std::size_t i = 0; i < n; ++i) boxes_total *= static_cast<double>(k_count);
  require(boxes_total <= static_cast<double>(kMaxPartitionBoxes),
          ErrorCode::invalid_argument, "partition has too many boxes");
  const std::size_t box_count = static_cast<std::size_t>(boxes_total);

  PartitionReport report;
  const std::uint64_t direct_hits = count_hits(cfg, workers, [&](std::span<const double> x) {
    return in_window(x, mu, cfg.s);
  });
  report.direct = make_tail_estimate(direct_hits, cfg.trials);

  std::vector<double> interval_mass(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    interval_mass[k] = cfg.law.mass(partition.lo(k), partition.hi(k));

  const std::uint64_t per_box =
      std::max<std::uint64_t>(100, cfg.trials / static_cast<std::uint64_t>(box_count));
  double variance = 0.0;
  for (std::size_t b = 0; b < box_count; ++b) {
    BoxEstimate box;
    box.index.resize(n);
    box.mass = 1.0;
    std::size_t code = b;
    for (std::size_t i = 0; i < n; ++i) {
      box.index[i] = code % k_count;
      code /= k_count;
      box.mass *= interval_mass[box.index[i]];
    }
    if (!(box.mass > 0.0)) continue;

    const SeedSpec box_seed = derive_seed(cfg.seed, b + 1);
    auto partials = run_chunks<std::uint64_t>(
        per_box, workers, [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
          Sampler sampler(cfg.law, box_seed, chunk);
          std::vector<double> x(n);
          std::uint64_t hits = 0;
          for (std::uint64_t t = 0; t < count; ++t) {
            for (std::size_t i = 0; i < n; ++i)
              x[i] = sampler.draw_restricted(partition.lo(box.index[i]),
                                             partition.hi(box.index[i]));
            if (in_window(x, mu, cfg.s)) ++hits;
          }
          return hits;
        });
    box.conditional = make_tail_estimate(
        std::accumulate(partials.begin(), partials.end(), std::uint64_t{0}), per_box);
    report.decomposed += box.mass * box.conditional.p_hat;
    variance += box.mass * box.mass * box.conditional.std_error * box.conditional.std_error;
    report.sup_box = std::max(report.sup_box, box.conditional.p_hat);
    report.boxes.push_back(std::move(box));
  }
  report.decomposed_std_error = std::sqrt(variance);
  const double combined = std::sqrt(report.direct.std_error * report.direct.std_error + variance);
  report.agree = std::abs(report.direct.p_hat - report.decomposed) <= kBoundSlackSigmas * combined;
  report.sup_holds =
      report.direct.p_hat <= report.sup_box + kBoundSlackSigmas * report.direct.std_error;
  return report;
}

RcmReport rcm_experiment(const DensitySpec& law, const Graph& graph, std::size_t center,
                         std::size_t radius, double s, double alpha,
                         std::uint64_t trials, SeedSpec seed, GraphGrowth growth,
                         unsigned workers) {
  const UniformLaw* uniform = law.as_uniform();
  require(uniform != nullptr, ErrorCode::invalid_argument,
          "the regularity experiment uses uniform potentials");
  RcmReport report;
  report.q_size = graph.ball(center, radius).size();
  require(report.q_size >= 2, ErrorCode::invalid_argument, "ball must contain >= 2 sites");
  report.radius = radius;
  report.s = s;
  report.alpha = alpha;

  ExperimentConfig cfg;
  cfg.law = law;
  cfg.n = report.q_size;
  cfg.trials = trials;
  cfg.s = s;
  cfg.alpha = alpha;
  cfg.seed = seed;
  cfg.mode = Mode::uniform_exact;
  report.tail = estimate_modulus_tail(cfg, workers);

  const RcmParams params = rcm_params_uniform(uniform->ell, alpha);
  report.check = rcm_check(params, report.q_size, s, report.tail.p_hat);
  report.holds = report.tail.p_hat <=
                 report.check.rhs + kBoundSlackSigmas * report.tail.std_error;
  report.growth_bound = growth.c_d * std::pow(static_cast<double>(radius), growth.d);
  report.growth_holds = growth.admits(report.q_size, radius);
  return report;
}

namespace {

// sup |F_sub - F_all| for sorted samples, sub drawn from all.
double ks_distance(std::span<const double> sub, std::span<const double> all) {
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  const double ns = static_cast<double>(sub.size());
  const double na = static_cast<double>(all.size());
  while (i < sub.size() && j < all.size()) {
    const double v = std::min(sub[i], all[j]);
    while (i < sub.size() && sub[i] <= v) ++i;
    while (j < all.size() && all[j] <= v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / ns - static_cast<double>(j) / na));
  }
  return best;
}

struct GaussChunk {
  std::vector<double> xi;
  std::vector<double> eta1;
};

}  // namespace

GaussCheckReport gaussian_independence_check(std::size_t n, std::uint64_t samples,
                                             std::size_t bins, double bin_width,
                                             SeedSpec seed, unsigned workers,
                                             double ks_tolerance, double peak_slack) {
  require(n >= 2, ErrorCode::invalid_argument, "n must be at least 2");
  require(bins >= 1 && samples >= 100 * bins, ErrorCode::invalid_argument,
          "need at least 100 samples per quantile bin");
  require(std::isfinite(bin_width) && bin_width > 0.0, ErrorCode::invalid_argument,
          "histogram bin width must be positive");
  const DensitySpec law = DensitySpec::gaussian(0.0, 1.0);
  auto chunks = run_chunks<GaussChunk>(
      samples, workers, [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
        GaussChunk out;
        out.xi.reserve(count);
        out.eta1.reserve(count);
        Sampler sampler(law, seed, chunk);
        std::vector<double> x(n);
        for (std::uint64_t k = 0; k < count; ++k) {
          sampler.fill(x);
          const double xi = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
          out.xi.push_back(xi);
          out.eta1.push_back(x[0] - xi);
        }
        return out;
      });
  std::vector<double> xi;
  std::vector<double> eta1;
  xi.reserve(samples);
  eta1.reserve(samples);
  for (const auto& c : chunks) {
    xi.insert(xi.end(), c.xi.begin(), c.xi.end());
    eta1.insert(eta1.end(), c.eta1.begin(), c.eta1.end());
  }

  GaussCheckReport r;
  r.n = n;
  r.samples = samples;
  r.bins = bins;
  r.bin_width = bin_width;
  r.ks_tolerance = ks_tolerance;
  r.peak_slack = peak_slack;
  r.density_bound = gaussian_mean_density_bound(n);

  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eta1[a] < eta1[b]; });
  std::vector<double> all = xi;
  std::sort(all.begin(), all.end());
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t first = b * samples / bins;
    const std::size_t last = (b + 1) * samples / bins;
    std::vector<double> group;
    group.reserve(last - first);
    for (std::size_t k = first; k < last; ++k) group.push_back(xi[order[k]]);
    std::sort(group.begin(), group.end());
    r.bin_ks.push_back(ks_distance(group, all));
  }
  r.max_ks = *std::max_element(r.bin_ks.begin(), r.bin_ks.end());

  const long lo = static_cast<long>(std::floor(all.front() / bin_width));
  const long hi = static_cast<long>(std::floor(all.back() / bin_width));
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
  for (double v : all) ++counts[static_cast<std::size_t>(static_cast<long>(std::floor(v / bin_width)) - lo)];
  const double scale = 1.0 / (static_cast<double>(samples) * bin_width);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double density = static_cast<double>(counts[k]) * scale;
    r.peak_density = std::max(r.peak_density, density);
    r.histogram.emplace_back((static_cast<double>(lo + static_cast<long>(k)) + 0.5) * bin_width,
                             density);
  }
  r.ks_ok = r.max_ks <= ks_tolerance;
  r.peak_ok = r.peak_density <= r.density_bound * (1.0 + peak_slack);
  return r;
}

namespace {

struct FiberPartial {
  std::vector<std::uint64_t> samples;
  std::vector<double> max_diff;
  std::vector<double> max_translation;
  std::vector<double> min_slack;
};

}  // namespace

std::vector<FiberIdentityRow> fiber_identity_check(std::span<const std::size_t> ns,
                                                   std::span<const double> ells,
                                                   std::uint64_t samples,
                                                   double step_rel, SeedSpec seed,
                                                   unsigned workers) {
  require(!ns.empty() && !ells.empty(), ErrorCode::invalid_argument,
          "fiber identity needs non-empty n and ell grids");
  require(std::isfinite(step_rel) && step_rel > 0.0 && step_rel < 1.0,
          ErrorCode::invalid_argument, "relative step must lie in (0, 1)");
  for (std::size_t n : ns) require(n >= 2, ErrorCode::invalid_argument, "n must be >= 2");
  for (double ell : ells)
    require(std::isfinite(ell) && ell > 0.0, ErrorCode::invalid_argument, "ell must be > 0");
  const std::size_t cells = ns.size() * ells.size();

  auto partials = run_chunks<FiberPartial>(
      samples, workers,
      [&](std::uint64_t chunk, std::uint64_t first, std::uint64_t count) {
        FiberPartial p;
        p.samples.assign(cells, 0);
        p.max_diff.assign(cells, 0.0);
        p.max_translation.assign(cells, 0.0);
        p.min_slack.assign(cells, INFINITY);
        Stream stream(seed, chunk);
        for (std::uint64_t k = 0; k < count; ++k) {
          const std::size_t cell = static_cast<std::size_t>((first + k) % cells);
          const std::size_t n = ns[cell / ells.size()];
          const double ell = ells[cell % ells.size()];
          std::vector<double> x(n);
          for (double& v : x) v = ell * stream.uniform();
          const FiberGeometry g = fiber_length_cube(x, ell);
          const double scan = fiber_length_bruteforce(x, ell, {}, step_rel * ell);
          p.max_diff[cell] = std::max(p.max_diff[cell], std::abs(g.length - scan));

          const double shift = -g.x_min + (ell - g.range) * stream.uniform();
          std::vector<double> moved(x);
          for (double& v : moved) v = std::clamp(v + shift, 0.0, ell);
          const FiberGeometry gm = fiber_length_cube(moved, ell);
          p.max_translation[cell] =
              std::max(p.max_translation[cell], std::abs(gm.length - g.length));
          p.min_slack[cell] = std::min(
              p.min_slack[cell], g.length - std::sqrt(static_cast<double>(n)) * g.x_min);
          ++p.samples[cell];
        }
        return p;
      },
      64);

  std::vector<FiberIdentityRow> rows(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    FiberIdentityRow& row = rows[c];
    row.n = ns[c / ells.size()];
    row.ell = ells[c % ells.size()];
    row.step = step_rel * row.ell;
    row.tolerance = 2.0 * row.step * std::sqrt(static_cast<double>(row.n));
    row.min_lower_bound_slack = INFINITY;
    for (const auto& p : partials) {
      row.samples += p.samples[c];
      row.max_abs_diff = std::max(row.max_abs_diff, p.max_diff[c]);
      row.max_translation_diff = std::max(row.max_translation_diff, p.max_translation[c]);
      row.min_lower_bound_slack = std::min(row.min_lower_bound_slack, p.min_slack[c]);
    }
    const double rounding = 1e-12 * row.ell * std::sqrt(static_cast<double>(row.n));
    row.pass = row.max_abs_diff <= row.tolerance &&
               row.max_translation_diff <= rounding &&
               row.min_lower_bound_slack >= -rounding;
  }
  return rows;
}

}  // namespace condmean
