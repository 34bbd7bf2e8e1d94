#ifndef MASING_MESH_HPP
#define MASING_MESH_HPP

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <masing/classify.hpp>

namespace masing
{

using Vec3 = std::array<double, 3>;

struct LocusVertex {
    Point<double> param;
    Vec3 point;
    friend bool operator==(const LocusVertex &, const LocusVertex &) = default;
};

struct MeshOptions {
    std::array<double, 2> u_range{-0.5, 0.5};
    std::array<double, 2> v_range{-0.5, 0.5};
    int grid = 50;
    // Lattice used to seed the locus search; 0 follows grid.
    int seed_grid = 0;
    double tol = 1e-9;
    double step = 5e-3;
};

/// Lattice image of pi o f. vertex (i, j) sits at index i * grid + j with
/// u = u_range[0] + i * du; faces are quads in counter-clockwise parameter order.
struct SurfaceMesh {
    Leg leg = Leg::pi1;
    std::array<double, 2> u_range{};
    std::array<double, 2> v_range{};
    int grid = 0;
    std::vector<Point<double>> params;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> faces;
    std::vector<std::vector<LocusVertex>> locus;

    friend bool operator==(const SurfaceMesh &, const SurfaceMesh &) = default;
};

enum class MeshFormat { obj, csv, json };

inline MeshFormat parse_mesh_format(const std::string &s)
{
    if (s == "obj") {
        return MeshFormat::obj;
    }
    if (s == "csv") {
        return MeshFormat::csv;
    }
    if (s == "json") {
        return MeshFormat::json;
    }
    throw std::invalid_argument("unknown mesh format '" + s + "' (expected obj|csv|json)");
}

inline SurfaceMesh evaluate_mesh(const LegendrianMapJet<double> &f, Leg leg, const MeshOptions &opt = {})
{
    if (opt.grid < 2) {
        throw std::invalid_argument("evaluate_mesh: grid must be at least 2");
    }
    if (!(opt.u_range[0] < opt.u_range[1]) || !(opt.v_range[0] < opt.v_range[1])) {
        throw std::invalid_argument("evaluate_mesh: empty parameter range");
    }
    FrontField field(f, leg);
    field.set_tol(opt.tol);

    SurfaceMesh m;
    m.leg = leg;
    m.u_range = opt.u_range;
    m.v_range = opt.v_range;
    m.grid = opt.grid;
    const int n = opt.grid;
    const double du = (opt.u_range[1] - opt.u_range[0]) / (n - 1);
    const double dv = (opt.v_range[1] - opt.v_range[0]) / (n - 1);
    m.params.reserve(static_cast<std::size_t>(n) * n);
    m.vertices.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double u = i == n - 1 ? opt.u_range[1] : opt.u_range[0] + i * du;
        for (int j = 0; j < n; ++j) {
            const double v = j == n - 1 ? opt.v_range[1] : opt.v_range[0] + j * dv;
            m.params.push_back({u, v});
            m.vertices.push_back(field.map({u, v}));
        }
    }
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const int a = i * n + j;
            m.faces.push_back({a, a + n, a + n + 1, a + 1});
        }
    }

    ContinuationOptions cont;
    cont.tol = opt.tol;
    cont.step = opt.step;
    cont.max_steps = 4000;
    cont.bounds = std::array<double, 4>{opt.u_range[0], opt.u_range[1], opt.v_range[0], opt.v_range[1]};
    const int seed_grid = opt.seed_grid > 0 ? opt.seed_grid : n - 1;
    auto inside = [&](const Point<double> &x) {
        return x[0] >= opt.u_range[0] && x[0] <= opt.u_range[1] && x[1] >= opt.v_range[0] && x[1] <= opt.v_range[1];
    };
    for (const auto &locus : trace_loci(field, seed_grid, cont)) {
        std::vector<LocusVertex> line;
        for (const auto &x : locus.points) {
            if (inside(x)) {
                line.push_back({x, field.map(x)});
            }
        }
        if (locus.closed && line.size() > 2) {
            line.push_back(line.front());
        }
        if (line.size() >= 2) {
            m.locus.push_back(std::move(line));
        }
    }
    return m;
}

inline json to_json(const SurfaceMesh &m)
{
    json locus = json::array();
    for (const auto &line : m.locus) {
        json l = json::array();
        for (const auto &p : line) {
            l.push_back({{"param", p.param}, {"point", p.point}});
        }
        locus.push_back(std::move(l));
    }
    return json{{"leg", leg_name(m.leg)}, {"u_range", m.u_range}, {"v_range", m.v_range}, {"grid", m.grid},
                {"params", m.params},   {"vertices", m.vertices}, {"faces", m.faces},     {"locus", std::move(locus)}};
}

inline SurfaceMesh mesh_from_json(const json &j)
{
    SurfaceMesh m;
    m.leg = parse_leg(j.at("leg").get<std::string>());
    m.u_range = j.at("u_range").get<std::array<double, 2>>();
    m.v_range = j.at("v_range").get<std::array<double, 2>>();
    m.grid = j.at("grid").get<int>();
    m.params = j.at("params").get<std::vector<Point<double>>>();
    m.vertices = j.at("vertices").get<std::vector<Vec3>>();
    m.faces = j.at("faces").get<std::vector<std::array<int, 4>>>();
    for (const auto &l : j.at("locus")) {
        std::vector<LocusVertex> line;
        for (const auto &p : l) {
            line.push_back({p.at("param").get<Point<double>>(), p.at("point").get<Vec3>()});
        }
        m.locus.push_back(std::move(line));
    }
    if (m.vertices.size() != m.params.size()
        || m.vertices.size() != static_cast<std::size_t>(m.grid) * static_cast<std::size_t>(m.grid)) {
        throw std::invalid_argument("mesh_from_json: vertex count does not match grid");
    }
    return m;
}

inline std::string to_obj(const SurfaceMesh &m)
{
    std::ostringstream os;
    os << "# masing " << leg_name(m.leg) << " grid " << m.grid << '\n';
    auto vertex = [&](const Vec3 &p) {
        os << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
    };
    for (const auto &p : m.vertices) {
        vertex(p);
    }
    for (const auto &line : m.locus) {
        for (const auto &p : line) {
            vertex(p.point);
        }
    }
    for (const auto &f : m.faces) {
        os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << ' ' << f[3] + 1 << '\n';
    }
    std::size_t next = m.vertices.size() + 1;
    for (const auto &line : m.locus) {
        os << 'l';
        for (std::size_t k = 0; k < line.size(); ++k) {
            os << ' ' << next++;
        }
        os << '\n';
    }
    return os.str();
}

/// Lattice vertices, then locus vertices (always flagged singular). A lattice
/// vertex is flagged when |Delta| <= tol relative to the Delta scale.
inline std::string to_csv(const SurfaceMesh &m, const LegendrianMapJet<double> *f = nullptr, double tol = 1e-9)
{
    std::optional<FrontField> field;
    if (f) {
        field.emplace(*f, m.leg);
    }
    std::ostringstream os;
    os << "u,v,X,Y,Z,is_singular\n";
    auto row = [&](const Point<double> &x, const Vec3 &p, bool singular) {
        os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(p[0]) << ','
           << format_double(p[1]) << ',' << format_double(p[2]) << ',' << (singular ? 1 : 0) << '\n';
    };
    for (std::size_t k = 0; k < m.vertices.size(); ++k) {
        const bool singular = field && std::abs(field->delta(m.params[k])) <= tol * field->scale();
        row(m.params[k], m.vertices[k], singular);
    }
    for (const auto &line : m.locus) {
        for (const auto &p : line) {
            row(p.param, p.point, true);
        }
    }
    return os.str();
}

inline void export_mesh(const SurfaceMesh &m, MeshFormat format, const std::string &path,
                        const LegendrianMapJet<double> *f = nullptr)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("export_mesh: cannot open '" + path + "' for writing");
    }
    switch (format) {
        case MeshFormat::obj:
            out << to_obj(m);
            break;
        case MeshFormat::csv:
            out << to_csv(m, f);
            break;
        case MeshFormat::json:
            out << to_json(m).dump(1) << '\n';
            break;
    }
    if (!out) {
        throw std::runtime_error("export_mesh: write to '" + path + "' failed");
    }
}

inline SurfaceMesh read_mesh_json(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_mesh_json: cannot open '" + path + "'");
    }
    return mesh_from_json(json::parse(in));
}

} // namespace masing

#endif
