#include "curvlab/serialization.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace curvlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// %.17g round-trips doubles exactly and keeps the output stable across runs.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ordered_json complexJson(Complex c) { return ordered_json{{"re", c.real()}, {"im", c.imag()}}; }

Complex complexFrom(const json& j) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw ParseError("complex values must be objects with re and im");
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    return j;
}

ordered_json fieldJson(const MatrixPolyField& f) {
    ordered_json coeffs = ordered_json::array();
    for (const auto& [deg, c] : f.coeffs()) {
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < c.rows(); ++r) {
            ordered_json row = ordered_json::array();
            for (int col = 0; col < c.cols(); ++col) row.push_back(complexJson(c(r, col)));
            rows.push_back(std::move(row));
        }
        coeffs.push_back(ordered_json{{"j", deg.j}, {"k", deg.k}, {"matrix", std::move(rows)}});
    }
    return ordered_json{{"rows", f.rows()}, {"cols", f.cols()}, {"coeffs", std::move(coeffs)}};
}

MatrixPolyField fieldFrom(const json& j) {
    if (!j.is_object()) throw ParseError("field must be a JSON object");
    try {
        const int rows = j.at("rows").get<int>();
        const int cols = j.at("cols").get<int>();
        MatrixPolyField f(rows, cols);
        for (const auto& entry : j.at("coeffs")) {
            const int dj = entry.at("j").get<int>();
            const int dk = entry.at("k").get<int>();
            if (dj < 0 || dk < 0) throw ParseError("bidegrees must be nonnegative");
            const auto& mat = entry.at("matrix");
            if (static_cast<int>(mat.size()) != rows)
                throw ParseError("coefficient matrix row count mismatch");
            Matrix c(rows, cols);
            for (int r = 0; r < rows; ++r) {
                const auto& row = mat.at(static_cast<std::size_t>(r));
                if (static_cast<int>(row.size()) != cols)
                    throw ParseError("coefficient matrix column count mismatch");
                for (int col = 0; col < cols; ++col)
                    c(r, col) = complexFrom(row.at(static_cast<std::size_t>(col)));
            }
            if (!c.allFinite()) throw ParseError("coefficient matrix has non-finite entries");
            f.addCoeff(dj, dk, c);
        }
        return f;
    } catch (const json::exception& e) {
        throw ParseError(std::string("field schema: ") + e.what());
    } catch (const FieldError& e) {
        throw ParseError(std::string("field values: ") + e.what());
    }
}

ordered_json gridJson(const GridDomain& g) {
    return ordered_json{{"center", complexJson(g.center())},
                        {"half_width_re", g.halfWidthRe()},
                        {"half_width_im", g.halfWidthIm()},
                        {"resolution", g.resolution()}};
}

GridDomain gridFrom(const json& j) {
    try {
        return GridDomain(complexFrom(j.at("center")), j.at("half_width_re").get<double>(),
                          j.at("half_width_im").get<double>(), j.at("resolution").get<int>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("grid schema: ") + e.what());
    } catch (const FieldError& e) {
        throw ParseError(std::string("grid values: ") + e.what());
    }
}

ordered_json fiberedJson(const FiberedMetric& fm) {
    ordered_json pts = ordered_json::array();
    for (int i = 0; i < fm.fiberCount(); ++i)
        pts.push_back(ordered_json{{"weight", fm.mu(i)},
                                   {"rho_coeffs", fieldJson(fm.rho().rho(i)).at("coeffs")}});
    return ordered_json{{"fiber_points", std::move(pts)}, {"a", fm.exponent()}};
}

FiberedMetric fiberedFrom(const json& j) {
    try {
        std::vector<double> weights;
        std::vector<MatrixPolyField> rho;
        for (const auto& pt : j.at("fiber_points")) {
            weights.push_back(pt.at("weight").get<double>());
            json wrapped{{"rows", 1}, {"cols", 1}, {"coeffs", pt.at("rho_coeffs")}};
            rho.push_back(fieldFrom(wrapped));
        }
        return FiberedMetric(std::move(weights), WeightField(std::move(rho)),
                             j.at("a").get<double>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("fibered metric schema: ") + e.what());
    } catch (const FieldError& e) {
        throw ParseError(std::string("fibered metric values: ") + e.what());
    }
}

}  // namespace

std::string toJson(const MatrixPolyField& f) { return fieldJson(f).dump(2); }

MatrixPolyField fieldFromJson(const std::string& text) { return fieldFrom(parse(text)); }

std::string toJson(const GridDomain& g) { return gridJson(g).dump(2); }

GridDomain gridFromJson(const std::string& text) { return gridFrom(parse(text)); }

std::string toJson(const FiberedMetric& fm) { return fiberedJson(fm).dump(2); }

FiberedMetric fiberedFromJson(const std::string& text) { return fiberedFrom(parse(text)); }

std::string toJson(const VerificationReport& rep) {
    ordered_json j{{"check", rep.check},
                   {"pass", rep.pass},
                   {"residual", rep.residual},
                   {"samples", rep.samples},
                   {"tolerance", rep.tolerance},
                   {"seed", rep.seed}};
    if (rep.inconclusive) j["inconclusive"] = true;
    if (rep.witness) {
        ordered_json w{{"s", complexJson(rep.witness->s)}, {"note", rep.witness->note}};
        ordered_json v = ordered_json::array();
        for (int i = 0; i < rep.witness->v.size(); ++i) v.push_back(complexJson(rep.witness->v(i)));
        w["v"] = std::move(v);
        j["witness"] = std::move(w);
    }
    if (!rep.details.empty()) {
        ordered_json d;
        for (const auto& [key, value] : rep.details) d[key] = value;
        j["details"] = std::move(d);
    }
    return j.dump(2);
}

std::string toJson(const PshReport& rep) {
    ordered_json j{{"verdict", toString(rep.verdict)},
                   {"worst_estimate", rep.worstEstimate},
                   {"worst_point", rep.worstPoint ? complexJson(*rep.worstPoint) : ordered_json()},
                   {"tolerance", rep.tolerance},
                   {"circle_nodes", rep.circleNodes},
                   {"nodes_tested", rep.nodesTested},
                   {"nodes_skipped", rep.nodesSkipped}};
    ordered_json radii = ordered_json::array();
    for (double r : rep.radii) radii.push_back(r);
    j["radii"] = std::move(radii);
    ordered_json per = ordered_json::array();
    for (double v : rep.worstPerRadius) per.push_back(std::isfinite(v) ? ordered_json(v) : ordered_json());
    j["worst_per_radius"] = std::move(per);
    return j.dump(2);
}

std::string curvatureMapCsv(const MetricField& m) {
    const GridDomain& g = m.domain();
    const int n = m.rank();
    std::ostringstream os;
    os << "re_s,im_s";
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) os << ",R" << r << c << "_re,R" << r << c << "_im";
    os << "\n";
    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const Complex s = g.node(ix, iy);
            const Matrix rm = m.curvatureAt(s);
            os << fmt(s.real()) << "," << fmt(s.imag());
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    os << "," << fmt(rm(r, c).real()) << "," << fmt(rm(r, c).imag());
            os << "\n";
        }
    return os.str();
}

std::string scalarFieldCsv(const ScalarSampleField& f, const std::string& valueName) {
    const GridDomain& g = f.domain();
    std::ostringstream os;
    os << "re_s,im_s," << valueName << "\n";
    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const Complex s = g.node(ix, iy);
            os << fmt(s.real()) << "," << fmt(s.imag()) << ",";
            if (f.valid(ix, iy))
                os << fmt(f.value(ix, iy));
            else
                os << "nan";
            os << "\n";
        }
    return os.str();
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
    if (!out) throw ParseError("write failed: " + path);
}

}  // namespace curvlab
