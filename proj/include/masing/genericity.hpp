#ifndef MASING_GENERICITY_HPP
#define MASING_GENERICITY_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <masing/classify.hpp>
#include <masing/solutions.hpp>

namespace masing
{

/// SplitMix64 finalizer; derives independent per-sample seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index)
{
    return splitmix64(seed ^ splitmix64(index));
}

/// mt19937_64 with a portable double mapping: top 53 bits times 2^-53.
class SampleRng
{
public:
    explicit SampleRng(std::uint64_t seed) : m_engine(seed) {}

    double uniform(double lo, double hi)
    {
        const double x = static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * x;
    }

private:
    std::mt19937_64 m_engine;
};

enum class SweepFamily { hess1, hess_minus1, gauss, developable };

inline const char *sweep_family_name(SweepFamily f)
{
    switch (f) {
        case SweepFamily::hess1:
            return "hess1";
        case SweepFamily::hess_minus1:
            return "hess-1";
        case SweepFamily::gauss:
            return "gauss";
        case SweepFamily::developable:
            return "developable";
    }
    return "?";
}

template <Scalar T>
SweepFamily family_of(const InitialData<T> &data)
{
    switch (data.index()) {
        case 0:
            return SweepFamily::hess1;
        case 1:
            return SweepFamily::hess_minus1;
        case 2:
            return SweepFamily::gauss;
        default:
            return SweepFamily::developable;
    }
}

struct SweepOptions {
    int order = default_order;
    double tol = 1e-9;
    // Zero test for stratum coefficients at located singular points.
    double strat_tol = 1e-6;
    double domain = 1.0; // seeds and traces live in [-domain, domain]^2
    ContinuationOptions continuation{};
    unsigned threads = 0; // 0: MA_SINGULAR_THREADS or hardware concurrency
};

struct StratumTally {
    std::string family;
    int samples = 0;
    std::uint64_t seed = 0;
    double magnitude = 0;
    int grid = 0;
    int order = 0;
    std::map<std::string, int> strata;                          // stratum of the base point, one per sample
    std::map<std::string, std::map<std::string, int>> verdicts; // leg -> verdict -> count
    int singular_points = 0;
    int loci = 0;
    int unresolved = 0;
    int degenerate = 0;
    int deep_hits = 0;
    int mismatches = 0;              // verdict differs from the stratum prediction
    int simultaneity_violations = 0; // Hess = +-1: one leg singular, the other not

    void merge(const StratumTally &o)
    {
        samples += o.samples;
        for (const auto &[k, v] : o.strata) {
            strata[k] += v;
        }
        for (const auto &[leg, m] : o.verdicts) {
            for (const auto &[k, v] : m) {
                verdicts[leg][k] += v;
            }
        }
        singular_points += o.singular_points;
        loci += o.loci;
        unresolved += o.unresolved;
        degenerate += o.degenerate;
        deep_hits += o.deep_hits;
        mismatches += o.mismatches;
        simultaneity_violations += o.simultaneity_violations;
    }
};

inline json to_json(const StratumTally &t)
{
    return json{{"family", t.family},
                {"samples", t.samples},
                {"seed", t.seed},
                {"magnitude", t.magnitude},
                {"grid", t.grid},
                {"order", t.order},
                {"strata", t.strata},
                {"verdicts", t.verdicts},
                {"singular_points", t.singular_points},
                {"loci", t.loci},
                {"unresolved", t.unresolved},
                {"degenerate", t.degenerate},
                {"deep_hits", t.deep_hits},
                {"mismatches", t.mismatches},
                {"simultaneity_violations", t.simultaneity_violations}};
}

inline std::string to_csv(const StratumTally &t)
{
    std::ostringstream os;
    os << "section,leg,key,count\n";
    for (const auto &[k, v] : t.strata) {
        os << "stratum,," << k << ',' << v << '\n';
    }
    for (const auto &[leg, m] : t.verdicts) {
        for (const auto &[k, v] : m) {
            os << "verdict," << leg << ',' << k << ',' << v << '\n';
        }
    }
    const std::pair<const char *, int> summary[] = {{"samples", t.samples},
                                                    {"singular_points", t.singular_points},
                                                    {"loci", t.loci},
                                                    {"unresolved", t.unresolved},
                                                    {"degenerate", t.degenerate},
                                                    {"deep_hits", t.deep_hits},
                                                    {"mismatches", t.mismatches},
                                                    {"simultaneity_violations", t.simultaneity_violations}};
    for (const auto &[k, v] : summary) {
        os << "summary,," << k << ',' << v << '\n';
    }
    return os.str();
}

/// Adds uniform noise in [-magnitude, magnitude] to the low-degree coefficients:
/// h_1..h_3 (re and im), phi/psi_1..3 (wave), Z0_2..4 and Z1_1..3 (Gauss),
/// phi/psi_1..4 (developable).
inline InitialData<double> perturb(const InitialData<double> &base, double magnitude, SampleRng &rng)
{
    auto bump = [&](Series1<double> &s, int lo, int hi) {
        for (int k = lo; k <= std::min(hi, s.order()); ++k) {
            s.at(k) += rng.uniform(-magnitude, magnitude);
        }
    };
    InitialData<double> d = base;
    std::visit(
        [&](auto &x) {
            using D = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<D, Holomorphic<double>>) {
                bump(x.h.re, 1, 3);
                bump(x.h.im, 1, 3);
            } else if constexpr (std::is_same_v<D, DAlembert<double>>) {
                bump(x.phi, 1, 3);
                bump(x.psi, 1, 3);
            } else if constexpr (std::is_same_v<D, Cauchy<double>>) {
                bump(x.z0, 2, 4);
                bump(x.z1, 1, 3);
            } else {
                bump(x.phi, 1, 4);
                bump(x.psi, 1, 4);
            }
        },
        d);
    return d;
}

/// Stratum of the jet at a parameter point, when the family has a coefficient
/// stratification there (Gauss-chart jets only at the origin).
inline std::optional<Stratum> stratum_at(const LegendrianMapJet<double> &f, SweepFamily family,
                                         const Point<double> &at, double tol)
{
    const bool origin = at[0] == 0.0 && at[1] == 0.0;
    switch (family) {
        case SweepFamily::hess1: {
            const auto c = hess1_coefficients(origin ? f : recenter(f, at));
            return stratify_hess1(c[0], c[1], c[2], c[3], c[4], c[5], tol);
        }
        case SweepFamily::gauss: {
            if (!origin) {
                return std::nullopt;
            }
            const auto c = gauss_coefficients(f);
            return stratify_gauss(c[0], c[1], c[2], c[3], c[4], c[5], tol);
        }
        case SweepFamily::developable: {
            const auto c = developable_coefficients(origin ? f : recenter(f, at));
            return stratify_developable(c[0], c[1], c[2], c[3], tol);
        }
        case SweepFamily::hess_minus1:
            return std::nullopt;
    }
    return std::nullopt;
}

namespace detail
{

inline bool near_any(const Point<double> &x, const std::vector<Point<double>> &pts, double r)
{
    return std::any_of(pts.begin(), pts.end(),
                       [&](const Point<double> &p) { return std::hypot(p[0] - x[0], p[1] - x[1]) < r; });
}

} // namespace detail

/// Classifies the origin and every located singular point of one jet on each leg.
inline StratumTally tally_jet(const LegendrianMapJet<double> &f, SweepFamily family, int grid,
                              const SweepOptions &opt = {})
{
    StratumTally t;
    t.family = sweep_family_name(family);
    t.samples = 1;
    t.grid = grid;
    t.order = f.order();

    const auto base = stratum_at(f, family, {0.0, 0.0}, opt.tol);
    t.strata[base ? base->label : "-"] += 1;
    if (base && !base->generic) {
        ++t.deep_hits;
    }

    ContinuationOptions cont = opt.continuation;
    cont.tol = opt.tol;
    cont.bounds = std::array<double, 4>{-opt.domain, opt.domain, -opt.domain, opt.domain};
    const bool paired = family == SweepFamily::hess1 || family == SweepFamily::hess_minus1;
    std::vector<Leg> legs{Leg::pi1};
    if (family != SweepFamily::developable) {
        legs.push_back(Leg::pi2);
    }

    for (Leg leg : legs) {
        FrontField field(f, leg);
        field.set_tol(opt.tol);
        std::optional<FrontField> other;
        if (paired) {
            other.emplace(f, leg == Leg::pi1 ? Leg::pi2 : Leg::pi1);
        }
        auto &counts = t.verdicts[leg_name(leg)];
        std::vector<Point<double>> classified;

        auto record = [&](const Point<double> &x) {
            if (detail::near_any(x, classified, 1e-6)) {
                return;
            }
            classified.push_back(x);
            const auto r = classify_point_traced(field, x, cont);
            counts[verdict_name(r.verdict)] += 1;
            if (r.verdict == Verdict::unresolved) {
                ++t.unresolved;
                ++t.deep_hits;
                return;
            }
            if (r.verdict == Verdict::degenerate) {
                ++t.degenerate;
                ++t.deep_hits;
                return;
            }
            if (r.verdict == Verdict::immersion) {
                return;
            }
            ++t.singular_points;
            if (other && std::abs(other->delta(x)) > opt.tol * other->scale()) {
                ++t.simultaneity_violations;
            }
            const auto s = stratum_at(f, family, x, opt.strat_tol);
            if (!s) {
                return;
            }
            if (!s->generic) {
                ++t.deep_hits;
                return;
            }
            const auto predicted = leg == Leg::pi1 ? s->pi1 : s->pi2;
            if (predicted && *predicted != r.verdict) {
                ++t.mismatches;
            }
        };

        record({0.0, 0.0});
        std::vector<Point<double>> traced;
        for (const auto &seed : locus_seeds(field, grid, *cont.bounds)) {
            if (detail::near_any(seed, traced, 2 * cont.step)) {
                continue;
            }
            Locus locus;
            try {
                locus = trace_singular_locus(field, seed, cont);
            } catch (const locus_error &) {
                // A seed on a degenerate point of Delta.
                const auto r = classify_point_traced(field, seed, cont);
                if (r.verdict == Verdict::degenerate && !detail::near_any(seed, classified, 1e-6)) {
                    classified.push_back(seed);
                    counts[verdict_name(r.verdict)] += 1;
                    ++t.degenerate;
                    ++t.deep_hits;
                }
                continue;
            }
            ++t.loci;
            traced.insert(traced.end(), locus.points.begin(), locus.points.end());
            record(locus.points[locus.seed_index]);
            for (const auto &x : det_sign_changes(field, locus, cont)) {
                record(x);
            }
        }
    }
    return t;
}

inline unsigned sweep_threads(unsigned requested, int samples)
{
    unsigned n = requested;
    if (n == 0) {
        if (const char *env = std::getenv("MA_SINGULAR_THREADS")) {
            n = static_cast<unsigned>(std::max(1L, std::strtol(env, nullptr, 10)));
        } else {
            n = std::max(1u, std::thread::hardware_concurrency());
        }
    }
    return std::max(1u, std::min(n, static_cast<unsigned>(std::max(samples, 1))));
}

/// Perturbs the base data `samples` times, rebuilds the jets and tallies the
/// classification of every detected singular point. Deterministic in the seed;
/// samples run concurrently and merge in index order.
inline StratumTally sample_and_tally(const InitialData<double> &base, double magnitude, int samples, int grid,
                                     std::uint64_t seed, const SweepOptions &opt = {})
{
    if (!(magnitude >= 0)) {
        throw std::invalid_argument("sample_and_tally: magnitude must be >= 0");
    }
    if (samples < 1) {
        throw std::invalid_argument("sample_and_tally: samples must be >= 1");
    }
    if (opt.order < 4) {
        throw std::invalid_argument("sample_and_tally: order must be at least 4");
    }
    const SweepFamily family = family_of(base);
    std::vector<StratumTally> parts(samples);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < samples; i = next++) {
            try {
                SampleRng rng(sample_seed(seed, static_cast<std::uint64_t>(i)));
                const auto data = perturb(base, magnitude, rng);
                parts[i] = tally_jet(build(data, opt.order), family, grid, opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const unsigned n = sweep_threads(opt.threads, samples);
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    StratumTally t;
    t.family = sweep_family_name(family);
    t.seed = seed;
    t.magnitude = magnitude;
    t.grid = grid;
    t.order = opt.order;
    for (const auto &p : parts) {
        t.merge(p);
    }
    return t;
}

} // namespace masing

#endif
