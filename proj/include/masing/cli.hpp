#ifndef MASING_CLI_HPP
#define MASING_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <masing/classify.hpp>
#include <masing/genericity.hpp>
#include <masing/legendrian.hpp>
#include <masing/mesh.hpp>
#include <masing/solutions.hpp>

namespace masing
{

/// Bad or inconsistent job configuration (exit status 2).
class config_error : public std::invalid_argument
{
public:
    config_error(const std::string &field, const std::string &what)
        : std::invalid_argument("config field '" + field + "': " + what), m_field(field)
    {
    }

    const std::string &field() const
    {
        return m_field;
    }

private:
    std::string m_field;
};

enum class ExitCode { ok = 0, verification_failed = 1, config = 2 };

struct MeshJob {
    std::vector<Leg> legs{Leg::pi1, Leg::pi2};
    MeshOptions options{};
    std::vector<MeshFormat> formats{MeshFormat::obj, MeshFormat::csv, MeshFormat::json};
};

struct SweepJob {
    int samples = 200;
    double magnitude = 0.5;
    int grid = 16;
    unsigned threads = 0;
};

struct JobConfig {
    std::string command;
    Backend backend = Backend::rational;
    int order = default_order;
    std::uint64_t seed = 0;
    std::string out = ".";
    json initial_data; // null when `jet` is given
    json jet;
    std::optional<Family> equation;
    std::optional<json> c;
    double residual_tol = 1e-9;
    double classify_tol = 1e-9;
    double strata_tol = 1e-6;
    std::vector<json> points{json::array({0, 0})};
    std::vector<Leg> legs{Leg::pi1, Leg::pi2};
    std::vector<int> fullness_degrees;
    MeshJob mesh;
    SweepJob sweep;
};

inline const std::vector<std::string> &cli_commands()
{
    static const std::vector<std::string> names{"build", "verify", "classify", "mesh", "sweep", "pipeline"};
    return names;
}

namespace detail
{

template <typename F>
auto config_field(const std::string &field, F &&read)
{
    try {
        return read();
    } catch (const config_error &) {
        throw;
    } catch (const std::exception &e) {
        throw config_error(field, e.what());
    }
}

inline std::vector<Leg> parse_legs(const json &j, const std::string &field)
{
    return config_field(field, [&] {
        std::vector<Leg> legs;
        if (j.is_string() && j.get<std::string>() == "both") {
            return std::vector<Leg>{Leg::pi1, Leg::pi2};
        }
        for (const auto &s : j.is_array() ? j : json::array({j})) {
            legs.push_back(parse_leg(s.get<std::string>()));
        }
        if (legs.empty()) {
            throw std::invalid_argument("at least one leg required");
        }
        return legs;
    });
}

inline std::array<double, 2> parse_range(const json &j, const std::string &field)
{
    return config_field(field, [&] {
        const auto r = j.get<std::array<double, 2>>();
        if (!(r[0] < r[1])) {
            throw std::invalid_argument("range must satisfy lo < hi");
        }
        return r;
    });
}

} // namespace detail

/// Parses a job config. Unknown top-level keys are rejected so that typos surface.
inline JobConfig parse_job_config(const json &j)
{
    using detail::config_field;
    if (!j.is_object()) {
        throw config_error("<root>", "config must be a JSON object");
    }
    static const std::vector<std::string> known{"command", "backend",    "order",    "seed", "out",
                                                "initial_data", "jet",   "equation", "c",    "tolerances",
                                                "points",  "legs",       "fullness_degrees", "mesh", "sweep"};
    for (const auto &[k, v] : j.items()) {
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw config_error(k, "unknown field");
        }
    }

    JobConfig cfg;
    cfg.command = config_field("command", [&] { return j.value("command", std::string()); });
    cfg.backend = config_field("backend", [&] { return parse_backend(j.value("backend", std::string("rational"))); });
    cfg.order = config_field("order", [&] { return j.value("order", default_order); });
    cfg.seed = config_field("seed", [&] { return j.value("seed", std::uint64_t{0}); });
    cfg.out = config_field("out", [&] { return j.value("out", std::string(".")); });
    if (j.contains("initial_data")) {
        cfg.initial_data = j.at("initial_data");
    }
    if (j.contains("jet")) {
        cfg.jet = j.at("jet");
    }
    if (j.contains("equation")) {
        const auto e = config_field("equation", [&] { return j.at("equation").get<std::string>(); });
        if (e == "hess") {
            cfg.equation = Family::hess;
        } else if (e == "gauss") {
            cfg.equation = Family::gauss;
        } else {
            throw config_error("equation", "expected hess|gauss, got '" + e + "'");
        }
    }
    if (j.contains("c")) {
        cfg.c = j.at("c");
    }
    if (j.contains("tolerances")) {
        const auto &t = j.at("tolerances");
        cfg.residual_tol = config_field("tolerances.residual", [&] { return t.value("residual", cfg.residual_tol); });
        cfg.classify_tol = config_field("tolerances.classify", [&] { return t.value("classify", cfg.classify_tol); });
        cfg.strata_tol = config_field("tolerances.strata", [&] { return t.value("strata", cfg.strata_tol); });
    }
    if (j.contains("points")) {
        cfg.points = config_field("points", [&] {
            std::vector<json> pts;
            for (const auto &p : j.at("points")) {
                if (!p.is_array() || p.size() != 2) {
                    throw std::invalid_argument("each point must be [u, v]");
                }
                pts.push_back(p);
            }
            return pts;
        });
    }
    if (j.contains("legs")) {
        cfg.legs = detail::parse_legs(j.at("legs"), "legs");
    }
    if (j.contains("fullness_degrees")) {
        cfg.fullness_degrees =
            config_field("fullness_degrees", [&] { return j.at("fullness_degrees").get<std::vector<int>>(); });
    }
    if (j.contains("mesh")) {
        const auto &m = j.at("mesh");
        if (m.contains("legs")) {
            cfg.mesh.legs = detail::parse_legs(m.at("legs"), "mesh.legs");
        }
        if (m.contains("u_range")) {
            cfg.mesh.options.u_range = detail::parse_range(m.at("u_range"), "mesh.u_range");
        }
        if (m.contains("v_range")) {
            cfg.mesh.options.v_range = detail::parse_range(m.at("v_range"), "mesh.v_range");
        }
        cfg.mesh.options.grid = config_field("mesh.grid", [&] { return m.value("grid", cfg.mesh.options.grid); });
        cfg.mesh.options.seed_grid =
            config_field("mesh.seed_grid", [&] { return m.value("seed_grid", cfg.mesh.options.seed_grid); });
        cfg.mesh.options.step = config_field("mesh.step", [&] { return m.value("step", cfg.mesh.options.step); });
        if (m.contains("formats")) {
            cfg.mesh.formats = config_field("mesh.formats", [&] {
                std::vector<MeshFormat> f;
                for (const auto &s : m.at("formats")) {
                    f.push_back(parse_mesh_format(s.get<std::string>()));
                }
                return f;
            });
        }
    }
    if (j.contains("sweep")) {
        const auto &s = j.at("sweep");
        cfg.sweep.samples = config_field("sweep.samples", [&] { return s.value("samples", cfg.sweep.samples); });
        cfg.sweep.magnitude = config_field("sweep.magnitude", [&] { return s.value("magnitude", cfg.sweep.magnitude); });
        cfg.sweep.grid = config_field("sweep.grid", [&] { return s.value("grid", cfg.sweep.grid); });
        cfg.sweep.threads = config_field("sweep.threads", [&] { return s.value("threads", cfg.sweep.threads); });
    }
    cfg.mesh.options.tol = cfg.classify_tol;
    return cfg;
}

inline void validate(const JobConfig &cfg)
{
    const auto &cmds = cli_commands();
    if (cfg.command.empty()) {
        throw config_error("command", "missing (expected build|verify|classify|mesh|sweep|pipeline)");
    }
    if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end()) {
        throw config_error("command", "unknown command '" + cfg.command + "'");
    }
    if (cfg.order < 4) {
        throw config_error("order", "must be at least 4");
    }
    if (cfg.initial_data.is_null() == cfg.jet.is_null()) {
        throw config_error("initial_data", "exactly one of 'initial_data' and 'jet' is required");
    }
    if (!cfg.jet.is_null() && cfg.command == "sweep") {
        throw config_error("initial_data", "sweep perturbs initial data; a jet cannot be swept");
    }
    if (!cfg.initial_data.is_null()) {
        if (!cfg.initial_data.is_object() || !cfg.initial_data.contains("variant")) {
            throw config_error("initial_data.variant", "missing");
        }
        const auto variant = cfg.initial_data.at("variant");
        const bool gauss = cfg.equation == Family::gauss || variant == "cauchy";
        if (cfg.equation == Family::gauss && variant != "cauchy") {
            throw config_error("equation", "gauss requires initial_data.variant 'cauchy'");
        }
        if (cfg.equation == Family::hess && variant == "cauchy") {
            throw config_error("equation", "cauchy initial data solves the gauss equation");
        }
        if (gauss) {
            std::optional<json> c = cfg.c;
            if (cfg.initial_data.contains("c")) {
                if (c && *c != cfg.initial_data.at("c")) {
                    throw config_error("c", "conflicts with initial_data.c");
                }
                c = cfg.initial_data.at("c");
            }
            if (!c) {
                throw config_error("c", "gauss (K = c) requires c != 0");
            }
            const Rational cv = detail::config_field("c", [&] { return scalar_from_json<Rational>(*c); });
            if (cv == 0) {
                throw config_error("c", "gauss (K = c) requires c != 0; use the developable variant for K = 0");
            }
        }
    }
    if (cfg.mesh.options.grid < 2) {
        throw config_error("mesh.grid", "must be at least 2");
    }
    if (cfg.sweep.samples < 1) {
        throw config_error("sweep.samples", "must be at least 1");
    }
    if (!(cfg.sweep.magnitude >= 0)) {
        throw config_error("sweep.magnitude", "must be >= 0");
    }
    for (int d : cfg.fullness_degrees) {
        if (d < 1 || d >= cfg.order) {
            throw config_error("fullness_degrees", "degrees must lie in [1, order - 1]");
        }
    }
}

namespace detail
{

inline void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
}

inline void write_json(const std::filesystem::path &path, const json &j)
{
    write_text(path, j.dump(2) + "\n");
}

template <Scalar T>
InitialData<T> config_initial_data(const JobConfig &cfg)
{
    json d = cfg.initial_data;
    if (d.at("variant") == "cauchy" && !d.contains("c")) {
        d["c"] = *cfg.c;
    }
    return config_field("initial_data", [&] { return initial_data_from_json<T>(d, cfg.order); });
}

template <Scalar T>
LegendrianMapJet<T> config_jet(const JobConfig &cfg)
{
    if (!cfg.initial_data.is_null()) {
        const auto data = config_initial_data<T>(cfg);
        return config_field("initial_data", [&] { return build(data, cfg.order); });
    }
    if (cfg.jet.is_string()) {
        if (cfg.jet == "open_umbrella") {
            return open_umbrella<T>(cfg.order);
        }
        throw config_error("jet", "unknown named jet " + cfg.jet.dump() + " (expected open_umbrella)");
    }
    return config_field("jet", [&] { return jet_from_json<T>(cfg.jet, false); });
}

template <Scalar T>
std::optional<MongeAmpereSystem<T>> config_system(const JobConfig &cfg)
{
    if (!cfg.initial_data.is_null()) {
        return system_of(config_initial_data<T>(cfg));
    }
    if (!cfg.equation) {
        return std::nullopt;
    }
    const T c = cfg.c ? config_field("c", [&] { return scalar_from_json<T>(*cfg.c); }) : T(1);
    return *cfg.equation == Family::gauss ? MongeAmpereSystem<T>::gauss(c) : MongeAmpereSystem<T>::hess(c);
}

inline std::optional<StratumFamily> stratum_family(const JobConfig &cfg)
{
    if (cfg.initial_data.is_null()) {
        return std::nullopt;
    }
    const auto v = cfg.initial_data.at("variant").get<std::string>();
    if (v == "holomorphic") {
        return StratumFamily::hess1;
    }
    if (v == "cauchy") {
        return StratumFamily::gauss;
    }
    if (v == "developable") {
        return StratumFamily::developable;
    }
    return std::nullopt;
}

template <Scalar T>
std::optional<Stratum> origin_stratum(const LegendrianMapJet<T> &f, StratumFamily family, double tol)
{
    switch (family) {
        case StratumFamily::hess1: {
            const auto c = hess1_coefficients(f);
            return stratify_hess1(c[0], c[1], c[2], c[3], c[4], c[5], tol);
        }
        case StratumFamily::gauss: {
            const auto c = gauss_coefficients(f);
            return stratify_gauss(c[0], c[1], c[2], c[3], c[4], c[5], tol);
        }
        case StratumFamily::developable: {
            const auto c = developable_coefficients(f);
            return stratify_developable(c[0], c[1], c[2], c[3], tol);
        }
    }
    return std::nullopt;
}

class Job
{
public:
    Job(const JobConfig &cfg, std::ostream &out) : m_cfg(cfg), m_out(out), m_dir(cfg.out) {}

    int run()
    {
        std::filesystem::create_directories(m_dir);
        if (m_cfg.backend == Backend::rational) {
            return dispatch<Rational>();
        }
        return dispatch<double>();
    }

private:
    template <Scalar T>
    int dispatch()
    {
        const auto &c = m_cfg.command;
        if (c == "build") {
            build_stage<T>();
            return 0;
        }
        if (c == "verify") {
            return verify_stage<T>() ? 0 : 1;
        }
        if (c == "classify") {
            classify_stage<T>();
            return 0;
        }
        if (c == "mesh") {
            mesh_stage();
            return 0;
        }
        if (c == "sweep") {
            sweep_stage();
            return 0;
        }
        build_stage<T>();
        const bool verified = verify_stage<T>();
        classify_stage<T>();
        mesh_stage();
        if (!m_cfg.initial_data.is_null()) {
            sweep_stage();
        }
        return verified ? 0 : 1;
    }

    template <Scalar T>
    void build_stage()
    {
        const auto f = config_jet<T>(m_cfg);
        json j{{"backend", scalar_traits<T>::name}, {"order", f.order()}, {"jet", to_json(f)}};
        if (!m_cfg.initial_data.is_null()) {
            j["initial_data"] = to_json(config_initial_data<T>(m_cfg));
        }
        write_json(m_dir / "jet.json", j);
        m_out << "build: order " << f.order() << " jet written to " << (m_dir / "jet.json").string() << '\n';
    }

    template <Scalar T>
    bool verify_stage()
    {
        const auto f = config_jet<T>(m_cfg);
        std::vector<ResidualReport<T>> reports{contact_residual(f)};
        if (const auto sys = config_system<T>(m_cfg)) {
            reports.push_back(ma_residual(f, *sys));
        }
        bool ok = true;
        json rows = json::array();
        m_out << "verify (" << scalar_traits<T>::name << ")\n";
        for (const auto &r : reports) {
            const bool pass = r.passes(m_cfg.residual_tol);
            ok = ok && pass;
            json row = to_json(r);
            row["pass"] = pass;
            rows.push_back(row);
            m_out << "  " << form_name(r.form) << "  order " << r.order() << "  max_abs "
                  << format_double(to_double(r.max_abs)) << "  " << (pass ? "zero" : "NONZERO") << '\n';
        }
        json fullness = json::array();
        for (int d : m_cfg.fullness_degrees) {
            const auto rep = fullness_check(f, d);
            fullness.push_back(to_json(rep));
            m_out << "  fullness degree " << d << "  dimension " << rep.dimension() << "  full "
                  << (rep.full ? "yes" : "no") << '\n';
        }
        json j{{"backend", scalar_traits<T>::name}, {"pass", ok}, {"residuals", rows}};
        if (!fullness.empty()) {
            j["fullness"] = fullness;
        }
        write_json(m_dir / "residuals.json", j);
        m_out << "verify: " << (ok ? "all residuals vanish" : "verification FAILED") << '\n';
        return ok;
    }

    template <Scalar T>
    void classify_stage()
    {
        const auto f = config_jet<T>(m_cfg);
        json points = json::array();
        for (const auto &pj : m_cfg.points) {
            const Point<T> at = config_field("points", [&] {
                return Point<T>{scalar_from_json<T>(pj[0]), scalar_from_json<T>(pj[1])};
            });
            json entry{{"point", pj}};
            m_out << "classify " << pj.dump() << ':';
            for (Leg leg : m_cfg.legs) {
                const auto r = config_field("points", [&] { return classify_point(f, leg, at, m_cfg.classify_tol); });
                entry[leg_name(leg)] = to_json(r);
                m_out << ' ' << leg_name(leg) << '=' << verdict_name(r.verdict);
            }
            m_out << '\n';
            points.push_back(entry);
        }
        json j{{"backend", scalar_traits<T>::name}, {"points", points}};
        if (const auto fam = stratum_family(m_cfg)) {
            if (const auto s = origin_stratum(f, *fam, m_cfg.strata_tol)) {
                j["stratum"] = to_json(*s);
                m_out << "  stratum at origin: " << s->label << '\n';
            }
        }
        write_json(m_dir / "classification.json", j);
    }

    void mesh_stage()
    {
        const auto f = config_jet<double>(m_cfg);
        for (Leg leg : m_cfg.mesh.legs) {
            const auto m = evaluate_mesh(f, leg, m_cfg.mesh.options);
            std::size_t locus_points = 0;
            for (const auto &l : m.locus) {
                locus_points += l.size();
            }
            for (MeshFormat fmt : m_cfg.mesh.formats) {
                const char *ext = fmt == MeshFormat::obj ? ".obj" : fmt == MeshFormat::csv ? ".csv" : ".json";
                const auto path = m_dir / (std::string("mesh_") + leg_name(leg) + ext);
                export_mesh(m, fmt, path.string(), &f);
            }
            m_out << "mesh " << leg_name(leg) << ": " << m.vertices.size() << " vertices, " << m.faces.size()
                  << " faces, " << m.locus.size() << " locus polylines (" << locus_points << " points)\n";
        }
    }

    void sweep_stage()
    {
        const auto base = config_initial_data<double>(m_cfg);
        SweepOptions opt;
        opt.order = m_cfg.order;
        opt.tol = m_cfg.classify_tol;
        opt.strat_tol = m_cfg.strata_tol;
        opt.threads = m_cfg.sweep.threads;
        const auto t = config_field("initial_data", [&] {
            return sample_and_tally(base, m_cfg.sweep.magnitude, m_cfg.sweep.samples, m_cfg.sweep.grid, m_cfg.seed,
                                    opt);
        });
        write_json(m_dir / "tally.json", to_json(t));
        write_text(m_dir / "tally.csv", to_csv(t));
        m_out << "sweep " << t.family << ": " << t.samples << " samples, " << t.singular_points
              << " singular points, unresolved " << t.unresolved << ", deep hits " << t.deep_hits << ", mismatches "
              << t.mismatches << '\n';
    }

    const JobConfig &m_cfg;
    std::ostream &m_out;
    std::filesystem::path m_dir;
};

} // namespace detail

/// Runs one job. Returns 0 on success, 1 when a verification fails, 2 on a config
/// error; runtime failures propagate.
inline int run(const JobConfig &cfg, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    try {
        validate(cfg);
        return detail::Job(cfg, out).run();
    } catch (const config_error &e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config);
    }
}

inline json read_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("--config", "cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw config_error("--config", std::string("malformed JSON: ") + e.what());
    }
}

} // namespace masing

#endif
