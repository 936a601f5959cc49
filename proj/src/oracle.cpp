#include "qvcz/oracle.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "qvcz/correlators.hpp"
#include "qvcz/grating.hpp"
#include "qvcz/rng.hpp"

namespace qvcz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

Port port_of(Pol p) { return p == Pol::H ? Port::H : Port::V; }

/// Projection weights per plane: w[det][proj][src](x) =
/// chirp_det(x) * P_{proj,src}(x). The source-polarization mixture is
/// evaluated by projecting every realization through all four branches.
struct PlaneTables {
  double nu = 0.0;
  double z = 0.0;
  std::vector<std::complex<double>> ky; ///< e^{i k y^2 / 2z} per row
  // indexed [det * 4 + proj * 2 + src]
  std::array<std::vector<std::complex<double>>, 8> w;
  double cal = 1.0; ///< intensity calibration to photon units
};

struct EngineSetup {
  detail::SamplerPlan plan;
  int n = 0;
  double det1 = 0.0, det2 = 0.0;
  std::vector<PlaneTables> planes;
};

struct BlockAccum {
  // g2 ratio sums per (plane, selector): numerator product, I1, I2.
  std::vector<double> x, y, z;
  // distributions per (plane, selector): probability sums and square sums.
  std::vector<Eigen::MatrixXd> psum, psumsq;
  std::vector<double> tail_sum;
  // cross moment per plane.
  std::vector<std::complex<double>> cross;
  std::uint64_t count = 0;
};

/// Poisson weights Poi(k; mean) for k = 0..cutoff; returns kept mass.
double poisson_weights(double mean, int cutoff, double* w) {
  double v = std::exp(-mean);
  double kept = 0.0;
  for (int k = 0; k <= cutoff; ++k) {
    w[k] = v;
    kept += v;
    v *= mean / (k + 1);
  }
  return kept;
}

int sample_poisson(double mean, Xoshiro256pp& rng) {
  // Knuth's product method; means here are O(1).
  const double limit = std::exp(-mean);
  int k = 0;
  double prod = rng.next_unit();
  while (prod > limit) {
    ++k;
    prod *= rng.next_unit();
  }
  return k;
}

} // namespace

void McRunConfig::validate(const PhysicalConfig& config) const {
  config.validate();
  if (realization_count < 100) {
    throw std::invalid_argument("oracle: realization_count must be >= 100");
  }
  if (nu_planes.empty()) {
    throw std::invalid_argument("oracle: at least one nu plane required");
  }
  for (double nu : nu_planes) {
    if (!(nu > 0.0)) {
      throw std::invalid_argument("oracle: nu planes must be positive");
    }
  }
  for (const auto& sel : dist_selectors) {
    if (!sel.is_diagonal()) {
      throw std::invalid_argument(
          "oracle: photon distributions require diagonal selectors, got " +
          sel.name());
    }
  }
  const GridSpec spec = grid_for_config(config);
  const double d1 = std::isnan(detector1_x)
                        ? 0.5 * config.detector_separation_m
                        : detector1_x;
  const double d2 = std::isnan(detector2_x)
                        ? -0.5 * config.detector_separation_m
                        : detector2_x;
  for (double nu : nu_planes) {
    const double z = z_from_nu(config, nu);
    const double reach = std::max(std::abs(d1), std::abs(d2)) +
                         0.5 * config.grating_width_m;
    const double bound = config.wavelength_m * z / (2.0 * reach);
    if (spec.spacing > bound * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "oracle: propagation sampling bound violated at nu = " +
          std::to_string(nu));
    }
  }
}

double expected_raw_intensity(const PhysicalConfig& config, double z,
                              const McRunConfig& run, Pol projection,
                              double detector_x) {
  // Exact branch-averaged second moment of the discrete pipeline; the
  // sampled covariance is the tap autocorrelation.
  const detail::SamplerPlan plan = detail::make_sampler_plan(config);
  const int n = plan.spec.n;
  const double drho = plan.spec.spacing;
  const double k = 2.0 * kPi / config.wavelength_m;
  const double hw = 0.5 * config.grating_width_m;

  const int taps_n = static_cast<int>(plan.taps.size());
  const int band = taps_n - 1;
  std::vector<double> cc(2 * band + 1, 0.0);
  for (int a = 0; a < taps_n; ++a) {
    for (int b = 0; b < taps_n; ++b) {
      cc[a - b + band] += plan.taps[a] * plan.taps[b];
    }
  }
  const double s2 = plan.scale * plan.scale;

  auto coord = [&](int i) { return -hw + (i + 0.5) * drho; };

  std::vector<std::complex<double>> ky(n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = coord(iy);
    ky[iy] = std::exp(kI * (k * y * y / (2.0 * z)));
  }
  std::complex<double> sy_all = 0.0;
  for (int y1 = 0; y1 < n; ++y1) {
    const int lo = std::max(0, y1 - band);
    const int hi = std::min(n - 1, y1 + band);
    for (int y2 = lo; y2 <= hi; ++y2) {
      sy_all += std::conj(ky[y1]) * ky[y2] * cc[y2 - y1 + band];
    }
  }

  std::vector<std::complex<double>> ch(n);
  std::vector<double> p_h(n), p_v(n);
  for (int ix = 0; ix < n; ++ix) {
    const double x = coord(ix);
    const double d = detector_x - x;
    ch[ix] = std::exp(kI * (k * d * d / (2.0 * z)));
    if (run.grating_enabled) {
      const GratingMatrix g = grating_matrix(x, config.grating_width_m);
      p_h[ix] = g(port_of(projection), Pol::H);
      p_v[ix] = g(port_of(projection), Pol::V);
    } else {
      p_h[ix] = projection == Pol::H ? 1.0 : 0.0;
      p_v[ix] = projection == Pol::V ? 1.0 : 0.0;
    }
  }

  // Branch average: single polarization keeps only the H branch, the
  // unpolarized mixture averages the two source branches equally.
  std::complex<double> total = 0.0;
  for (int x1 = 0; x1 < n; ++x1) {
    const int lo = std::max(0, x1 - band);
    const int hi = std::min(n - 1, x1 + band);
    for (int x2 = lo; x2 <= hi; ++x2) {
      const std::complex<double> w =
          std::conj(ch[x1]) * ch[x2] * (s2 * cc[x2 - x1 + band]);
      double branch;
      if (run.single_polarization) {
        branch = p_h[x1] * p_h[x2];
      } else {
        branch = 0.5 * (p_h[x1] * p_h[x2] + p_v[x1] * p_v[x2]);
      }
      total += w * branch;
    }
  }
  total *= sy_all;
  if (std::abs(total.imag()) > 1e-9 * std::abs(total.real())) {
    throw std::runtime_error("expected_raw_intensity: non-real result");
  }
  return total.real();
}

namespace {

EngineSetup prepare_engine(const PhysicalConfig& config,
                           const McRunConfig& run) {
  EngineSetup setup;
  setup.plan = detail::make_sampler_plan(config);
  setup.n = setup.plan.spec.n;
  setup.det1 = std::isnan(run.detector1_x)
                   ? 0.5 * config.detector_separation_m
                   : run.detector1_x;
  setup.det2 = std::isnan(run.detector2_x)
                   ? -0.5 * config.detector_separation_m
                   : run.detector2_x;

  const int n = setup.n;
  const double hw = 0.5 * config.grating_width_m;
  const double drho = setup.plan.spec.spacing;
  const double k = 2.0 * kPi / config.wavelength_m;
  auto coord = [&](int i) { return -hw + (i + 0.5) * drho; };

  const double mean_occ = detector_mean_occupation(config);
  for (double nu : run.nu_planes) {
    PlaneTables pt;
    pt.nu = nu;
    pt.z = z_from_nu(config, nu);
    pt.ky.resize(n);
    for (int i = 0; i < n; ++i) {
      const double y = coord(i);
      pt.ky[i] = std::exp(kI * (k * y * y / (2.0 * pt.z)));
    }
    for (int det = 0; det < 2; ++det) {
      const double dx = det == 0 ? setup.det1 : setup.det2;
      for (int ix = 0; ix < n; ++ix) {
        const double x = coord(ix);
        const double d = dx - x;
        const std::complex<double> chirp =
            std::exp(kI * (k * d * d / (2.0 * pt.z)));
        for (int proj = 0; proj < 2; ++proj) {
          for (int src = 0; src < 2; ++src) {
            double p;
            if (run.grating_enabled) {
              p = grating_entry(port_of(static_cast<Pol>(proj)),
                                static_cast<Pol>(src), kPi * x / (2.0 * hw));
            } else {
              p = proj == src ? 1.0 : 0.0;
            }
            auto& vec = pt.w[det * 4 + proj * 2 + src];
            if (vec.empty()) vec.resize(n);
            vec[ix] = chirp * p;
          }
        }
      }
    }
    if (run.frozen_field) {
      std::complex<double> sy = 0.0;
      for (int i = 0; i < n; ++i) sy += pt.ky[i];
      std::complex<double> u = 0.0;
      const auto& w_hh = pt.w[0]; // detector 1, H projection, H source
      for (int i = 0; i < n; ++i) u += w_hh[i];
      const double raw = std::norm(u * sy);
      pt.cal = raw > 0.0 ? mean_occ / raw : 0.0;
    } else {
      double raw = 0.0;
      int cnt = 0;
      for (Pol p : {Pol::H, Pol::V}) {
        if (run.single_polarization && p == Pol::V) continue;
        for (double dx : {setup.det1, setup.det2}) {
          raw += expected_raw_intensity(config, pt.z, run, p, dx);
          ++cnt;
        }
      }
      raw /= cnt;
      pt.cal = mean_occ / raw;
    }
    setup.planes.push_back(std::move(pt));
  }
  return setup;
}

/// Worker state reused across realizations.
struct Scratch {
  std::vector<std::complex<double>> field; // sampled Sigma
  std::vector<std::complex<double>> conv;  // sampler workspace
  std::vector<std::complex<double>> bline; // y-reduced line
  std::vector<double> w1h, w1v, w2h, w2v;  // branch Poisson weights
  std::vector<double> wm1, wm2;            // branch-averaged weights
};

void process_realization(const McRunConfig& run, const EngineSetup& setup,
                         std::uint64_t index, Scratch& sc, BlockAccum& acc) {
  const int n = setup.n;
  const bool mixture = !run.single_polarization && !run.frozen_field;

  if (!run.frozen_field) {
    const std::uint64_t field_seed = substream_key(run.seed, index);
    detail::sample_field_into(setup.plan, field_seed, sc.conv, sc.field);
  } else if (sc.field.empty()) {
    sc.field.assign(static_cast<std::size_t>(n) * n, {1.0, 0.0});
  }

  sc.bline.resize(n);
  sc.w1h.resize(run.cutoff + 1);
  sc.w1v.resize(run.cutoff + 1);
  sc.w2h.resize(run.cutoff + 1);
  sc.w2v.resize(run.cutoff + 1);
  sc.wm1.resize(run.cutoff + 1);
  sc.wm2.resize(run.cutoff + 1);

  Xoshiro256pp count_rng(substream_key(run.seed ^ 0x5bf0a8dcULL, index));

  for (std::size_t pi = 0; pi < setup.planes.size(); ++pi) {
    const PlaneTables& pt = setup.planes[pi];

    // y-reduction of the single field draw.
    std::fill(sc.bline.begin(), sc.bline.end(), std::complex<double>{0.0, 0.0});
    for (int iy = 0; iy < n; ++iy) {
      const std::complex<double> w = pt.ky[iy];
      const std::complex<double>* row =
          &sc.field[static_cast<std::size_t>(iy) * n];
      double* dst = reinterpret_cast<double*>(sc.bline.data());
      const double* src = reinterpret_cast<const double*>(row);
      const double wr = w.real(), wi = w.imag();
      for (int ix = 0; ix < n; ++ix) {
        const double sr = src[2 * ix], si = src[2 * ix + 1];
        dst[2 * ix] += wr * sr - wi * si;
        dst[2 * ix + 1] += wr * si + wi * sr;
      }
    }

    // Detected amplitudes per (detector, projection, source branch).
    std::complex<double> u[2][2][2];
    for (int det = 0; det < 2; ++det) {
      for (int proj = 0; proj < 2; ++proj) {
        for (int src = 0; src < 2; ++src) {
          const auto& wv = pt.w[det * 4 + proj * 2 + src];
          std::complex<double> accu = 0.0;
          for (int ix = 0; ix < n; ++ix) accu += wv[ix] * sc.bline[ix];
          u[det][proj][src] = accu;
        }
      }
    }

    // Mixture-averaged cross moment <u_H*(r1) u_H(r2)> in photon units.
    if (mixture) {
      acc.cross[pi] += 0.5 * pt.cal *
                       (std::conj(u[0][0][0]) * u[1][0][0] +
                        std::conj(u[0][0][1]) * u[1][0][1]);
    } else {
      acc.cross[pi] += pt.cal * std::conj(u[0][0][0]) * u[1][0][0];
    }

    for (std::size_t si = 0; si < run.g2_selectors.size(); ++si) {
      const PolSelector& sel = run.g2_selectors[si];
      const std::size_t slot = pi * run.g2_selectors.size() + si;
      const int i = static_cast<int>(sel.i), j = static_cast<int>(sel.j);
      const int kk = static_cast<int>(sel.k), l = static_cast<int>(sel.l);
      double num = 0.0, i1 = 0.0, i2 = 0.0;
      if (mixture) {
        // 1/4-weighted conditional average over the source branches:
        // (i, k) share the branch at detector 1, (j, l) at detector 2.
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            num += 0.25 * (std::conj(u[0][i][a]) * std::conj(u[1][j][b]) *
                           u[0][kk][a] * u[1][l][b])
                              .real();
          }
          i1 += 0.5 * std::norm(u[0][i][a]);
          i2 += 0.5 * std::norm(u[1][j][a]);
        }
      } else {
        num = (std::conj(u[0][i][0]) * std::conj(u[1][j][0]) * u[0][kk][0] *
               u[1][l][0])
                  .real();
        i1 = std::norm(u[0][i][0]);
        i2 = std::norm(u[1][j][0]);
      }
      acc.x[slot] += num * pt.cal * pt.cal;
      acc.y[slot] += i1 * pt.cal;
      acc.z[slot] += i2 * pt.cal;
    }

    for (std::size_t si = 0; si < run.dist_selectors.size(); ++si) {
      const PolSelector& sel = run.dist_selectors[si];
      const std::size_t slot = pi * run.dist_selectors.size() + si;
      const int i = static_cast<int>(sel.i), j = static_cast<int>(sel.j);
      Eigen::MatrixXd& ps = acc.psum[slot];
      Eigen::MatrixXd& ps2 = acc.psumsq[slot];
      const int nmax = run.cutoff;

      double kept1 = 1.0, kept2 = 1.0;
      if (mixture) {
        // The conditional distribution factorizes over the detectors:
        // p(n, m | Sigma) = mean_A Poi(n; I1_A) . mean_B Poi(m; I2_B).
        const double i1h = std::norm(u[0][i][0]) * pt.cal;
        const double i1v = std::norm(u[0][i][1]) * pt.cal;
        const double i2h = std::norm(u[1][j][0]) * pt.cal;
        const double i2v = std::norm(u[1][j][1]) * pt.cal;
        if (run.integer_count_sampling) {
          const double pick1 = count_rng.next_unit();
          const double pick2 = count_rng.next_unit();
          const int k1 = sample_poisson(pick1 < 0.5 ? i1h : i1v, count_rng);
          const int k2 = sample_poisson(pick2 < 0.5 ? i2h : i2v, count_rng);
          if (k1 <= nmax && k2 <= nmax) {
            ps(k1, k2) += 1.0;
            ps2(k1, k2) += 1.0;
          } else {
            acc.tail_sum[slot] += 1.0;
          }
          continue;
        }
        kept1 = 0.5 * (poisson_weights(i1h, nmax, sc.w1h.data()) +
                       poisson_weights(i1v, nmax, sc.w1v.data()));
        kept2 = 0.5 * (poisson_weights(i2h, nmax, sc.w2h.data()) +
                       poisson_weights(i2v, nmax, sc.w2v.data()));
        for (int t = 0; t <= nmax; ++t) {
          sc.wm1[t] = 0.5 * (sc.w1h[t] + sc.w1v[t]);
          sc.wm2[t] = 0.5 * (sc.w2h[t] + sc.w2v[t]);
        }
      } else {
        const double i1 = std::norm(u[0][i][0]) * pt.cal;
        const double i2 = std::norm(u[1][j][0]) * pt.cal;
        if (run.integer_count_sampling) {
          const int k1 = sample_poisson(i1, count_rng);
          const int k2 = sample_poisson(i2, count_rng);
          if (k1 <= nmax && k2 <= nmax) {
            ps(k1, k2) += 1.0;
            ps2(k1, k2) += 1.0;
          } else {
            acc.tail_sum[slot] += 1.0;
          }
          continue;
        }
        kept1 = poisson_weights(i1, nmax, sc.wm1.data());
        kept2 = poisson_weights(i2, nmax, sc.wm2.data());
      }
      for (int a = 0; a <= nmax; ++a) {
        const double wa = sc.wm1[a];
        for (int b = 0; b <= nmax; ++b) {
          const double v = wa * sc.wm2[b];
          ps(a, b) += v;
          ps2(a, b) += v * v;
        }
      }
      acc.tail_sum[slot] += 1.0 - kept1 * kept2;
    }
  }
  acc.count += 1;
}

} // namespace

std::vector<McPlaneResult> run_oracle(const PhysicalConfig& config,
                                      const McRunConfig& run) {
  run.validate(config);
  const EngineSetup setup = prepare_engine(config, run);

  const std::uint64_t total = run.realization_count;
  const int blocks = std::max(2, std::min<int>(run.blocks,
                                               static_cast<int>(total / 2)));
  const std::size_t n_planes = run.nu_planes.size();
  const std::size_t g2_slots = n_planes * run.g2_selectors.size();
  const std::size_t dist_slots = n_planes * run.dist_selectors.size();

  auto make_block = [&] {
    BlockAccum b;
    b.x.assign(g2_slots, 0.0);
    b.y.assign(g2_slots, 0.0);
    b.z.assign(g2_slots, 0.0);
    b.psum.assign(dist_slots,
                  Eigen::MatrixXd::Zero(run.cutoff + 1, run.cutoff + 1));
    b.psumsq.assign(dist_slots,
                    Eigen::MatrixXd::Zero(run.cutoff + 1, run.cutoff + 1));
    b.tail_sum.assign(dist_slots, 0.0);
    b.cross.assign(n_planes, {0.0, 0.0});
    return b;
  };

  std::vector<BlockAccum> block_results(blocks, make_block());

  int threads = run.threads > 0
                    ? run.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, blocks);

  auto block_range = [&](int b) {
    const std::uint64_t lo = total * static_cast<std::uint64_t>(b) / blocks;
    const std::uint64_t hi =
        total * static_cast<std::uint64_t>(b + 1) / blocks;
    return std::pair<std::uint64_t, std::uint64_t>{lo, hi};
  };

  auto worker = [&](int thread_id) {
    Scratch sc;
    for (int b = thread_id; b < blocks; b += threads) {
      BlockAccum& acc = block_results[b];
      const auto [lo, hi] = block_range(b);
      for (std::uint64_t r = lo; r < hi; ++r) {
        process_realization(run, setup, r, sc, acc);
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // Merge in fixed block order and form jackknife estimates.
  std::vector<McPlaneResult> results(n_planes);
  const double r_total = static_cast<double>(total);

  auto jackknife = [&](auto value_of) {
    const double full = value_of(-1);
    std::vector<double> reps(blocks);
    double mean_rep = 0.0;
    for (int b = 0; b < blocks; ++b) {
      reps[b] = value_of(b);
      mean_rep += reps[b];
    }
    mean_rep /= blocks;
    double var = 0.0;
    for (int b = 0; b < blocks; ++b) {
      var += (reps[b] - mean_rep) * (reps[b] - mean_rep);
    }
    var *= static_cast<double>(blocks - 1) / blocks;
    McEstimate est;
    est.value = full;
    est.standard_error = std::sqrt(var);
    est.realization_count = total;
    return est;
  };

  for (std::size_t pi = 0; pi < n_planes; ++pi) {
    McPlaneResult& pr = results[pi];
    pr.nu = run.nu_planes[pi];
    pr.z = setup.planes[pi].z;

    for (std::size_t si = 0; si < run.g2_selectors.size(); ++si) {
      const std::size_t slot = pi * run.g2_selectors.size() + si;
      double tx = 0.0, ty = 0.0, tz = 0.0;
      for (const auto& b : block_results) {
        tx += b.x[slot];
        ty += b.y[slot];
        tz += b.z[slot];
      }
      if (!(ty > 0.0) || !(tz > 0.0)) {
        throw std::domain_error("mc_g2: zero mean intensity for selector " +
                                run.g2_selectors[si].name());
      }
      auto g2_of = [&](int drop) {
        double sx = tx, sy = ty, sz = tz, cnt = r_total;
        if (drop >= 0) {
          sx -= block_results[drop].x[slot];
          sy -= block_results[drop].y[slot];
          sz -= block_results[drop].z[slot];
          const auto [lo, hi] = block_range(drop);
          cnt -= static_cast<double>(hi - lo);
        }
        return sx * cnt / (sy * sz);
      };
      pr.g2.push_back(jackknife(g2_of));
    }

    {
      std::complex<double> tc = 0.0;
      for (const auto& b : block_results) tc += b.cross[pi];
      auto part_of = [&](int drop, bool real_part) {
        std::complex<double> s = tc;
        double cnt = r_total;
        if (drop >= 0) {
          s -= block_results[drop].cross[pi];
          const auto [lo, hi] = block_range(drop);
          cnt -= static_cast<double>(hi - lo);
        }
        return (real_part ? s.real() : s.imag()) / cnt;
      };
      pr.cross_moment_re =
          jackknife([&](int drop) { return part_of(drop, true); });
      pr.cross_moment_im =
          jackknife([&](int drop) { return part_of(drop, false); });
    }

    for (std::size_t si = 0; si < run.dist_selectors.size(); ++si) {
      const std::size_t slot = pi * run.dist_selectors.size() + si;
      McDistribution md;
      md.realization_count = total;
      md.dist.selector = run.dist_selectors[si];
      md.dist.cutoff = run.cutoff;
      md.dist.nu = pr.nu;
      md.dist.z = pr.z;
      Eigen::MatrixXd ps = Eigen::MatrixXd::Zero(run.cutoff + 1, run.cutoff + 1);
      Eigen::MatrixXd ps2 = ps;
      double tail = 0.0;
      for (const auto& b : block_results) {
        ps += b.psum[slot];
        ps2 += b.psumsq[slot];
        tail += b.tail_sum[slot];
      }
      md.dist.p = ps / r_total;
      md.dist.tail_mass = tail / r_total;
      md.entry_stderr = Eigen::MatrixXd::Zero(run.cutoff + 1, run.cutoff + 1);
      for (int a = 0; a <= run.cutoff; ++a) {
        for (int b = 0; b <= run.cutoff; ++b) {
          const double mean = md.dist.p(a, b);
          const double var =
              std::max(0.0, ps2(a, b) / r_total - mean * mean);
          md.entry_stderr(a, b) = std::sqrt(var / (r_total - 1.0));
        }
      }
      pr.dists.push_back(std::move(md));
    }
  }
  return results;
}

McEstimate mc_g2(const McRunConfig& run, const PhysicalConfig& config,
                 const PolSelector& selector) {
  McRunConfig single = run;
  single.g2_selectors = {selector};
  single.dist_selectors.clear();
  const auto results = run_oracle(config, single);
  return results.front().g2.front();
}

McDistribution mc_photon_distribution(const McRunConfig& run,
                                      const PhysicalConfig& config,
                                      const PolSelector& selector,
                                      int cutoff) {
  McRunConfig single = run;
  single.g2_selectors.clear();
  single.dist_selectors = {selector};
  single.cutoff = cutoff;
  const auto results = run_oracle(config, single);
  const McDistribution& md = results.front().dists.front();
  if (md.dist.tail_mass > 1e-3) {
    throw CutoffError("mc_photon_distribution: tail mass " +
                          std::to_string(md.dist.tail_mass) +
                          " exceeds 1e-3 at cutoff " + std::to_string(cutoff),
                      2 * cutoff);
  }
  return md;
}

std::vector<ValidationEntry> run_validation_matrix(
    const PhysicalConfig& config, const std::vector<PolSelector>& selectors,
    const std::vector<double>& nu_values, std::uint64_t realizations,
    std::uint64_t seed) {
  McRunConfig run;
  run.realization_count = realizations;
  run.seed = seed;
  run.nu_planes = nu_values;
  run.g2_selectors = selectors;

  const auto results = run_oracle(config, run);
  std::vector<ValidationEntry> entries;
  for (std::size_t pi = 0; pi < nu_values.size(); ++pi) {
    for (std::size_t si = 0; si < selectors.size(); ++si) {
      ValidationEntry e;
      e.selector = selectors[si].name();
      e.nu = nu_values[pi];
      e.analytic = g2_closed_form(selectors[si], nu_values[pi]);
      e.mc_value = results[pi].g2[si].value;
      e.mc_stderr = results[pi].g2[si].standard_error;
      e.z_score = e.mc_stderr > 0.0
                      ? (e.mc_value - e.analytic) / e.mc_stderr
                      : 0.0;
      entries.push_back(e);
    }
  }
  return entries;
}

} // namespace qvcz
