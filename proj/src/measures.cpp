#include "depthlab/measures.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace depthlab {

using Kind = Error::Kind;

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Vec> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim_ < 1) fail(Kind::InvalidArgument, "measure: dim must be >= 1");
    if (points_.empty()) fail(Kind::InvalidArgument, "measure: no points");
    if (points_.size() != weights_.size()) fail(Kind::InvalidArgument, "measure: points/weights length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != dim_) {
            std::ostringstream os;
            os << "measure: point " << i << " has dimension " << points_[i].size() << ", expected " << dim_;
            fail(Kind::DimensionMismatch, os.str());
        }
        if (!points_[i].allFinite()) fail(Kind::InvalidArgument, "measure: non-finite coordinate");
        if (!(weights_[i] > 0.0)) fail(Kind::InvalidArgument, "measure: weights must be positive");
        s += weights_[i];
    }
    if (std::abs(s - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "measure: weights sum to " << s;
        fail(Kind::InvalidArgument, os.str());
    }
}

DiscreteMeasure DiscreteMeasure::translated(const Vec& shift) const {
    if (shift.size() != dim_) fail(Kind::DimensionMismatch, "translate: dimension mismatch");
    auto pts = points_;
    for (auto& p : pts) p += shift;
    return DiscreteMeasure(dim_, std::move(pts), weights_);
}

DiscreteMeasure DiscreteMeasure::transformed(const Mat& A) const {
    if (A.cols() != dim_) fail(Kind::DimensionMismatch, "transform: dimension mismatch");
    std::vector<Vec> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.push_back(A * p);
    return DiscreteMeasure(static_cast<int>(A.rows()), std::move(pts), weights_);
}

DiscreteMeasure DiscreteMeasure::reweighted(const std::vector<double>& w) const {
    return make_measure(points_, w);
}

Vec DiscreteMeasure::mean() const {
    Vec c = Vec::Zero(dim_);
    for (size_t i = 0; i < points_.size(); ++i) c += weights_[i] * points_[i];
    return c;
}

DiscreteMeasure make_measure(const std::vector<Vec>& points, const std::vector<double>& weights) {
    if (points.empty()) fail(Kind::InvalidArgument, "make_measure: empty input");
    if (points.size() != weights.size()) fail(Kind::InvalidArgument, "make_measure: points/weights length mismatch");
    const auto dim = points.front().size();
    double total = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim) {
            std::ostringstream os;
            os << "make_measure: point " << i << " has dimension " << points[i].size() << ", expected " << dim;
            fail(Kind::DimensionMismatch, os.str());
        }
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            std::ostringstream os;
            os << "make_measure: weight " << i << " is negative or not finite";
            fail(Kind::InvalidArgument, os.str());
        }
        total += weights[i];
    }
    if (!(total > 0.0)) fail(Kind::InvalidArgument, "make_measure: weights sum to zero");
    std::vector<Vec> pts;
    std::vector<double> w;
    for (size_t i = 0; i < points.size(); ++i) {
        if (weights[i] == 0.0) continue;
        pts.push_back(points[i]);
        w.push_back(weights[i] / total);
    }
    // Push the rounding residue onto the largest weight so the sum is 1 to the last ulp or so.
    double s = 0.0;
    for (double x : w) s += x;
    size_t big = std::max_element(w.begin(), w.end()) - w.begin();
    w[big] += 1.0 - s;
    return DiscreteMeasure(static_cast<int>(dim), std::move(pts), std::move(w));
}

MeasureKind parse_measure_kind(const std::string& s) {
    if (s == "simplex_mixture") return MeasureKind::SimplexMixture;
    if (s == "gaussian") return MeasureKind::Gaussian;
    if (s == "uniform_ball") return MeasureKind::UniformBall;
    if (s == "cross_polytope") return MeasureKind::CrossPolytope;
    if (s == "point_masses") return MeasureKind::PointMasses;
    if (s == "file") return MeasureKind::File;
    fail(Kind::InvalidArgument, "unknown measure kind '" + s +
                                    "' (expected simplex_mixture, gaussian, uniform_ball, cross_polytope, point_masses, file)");
}

std::string to_string(MeasureKind k) {
    switch (k) {
        case MeasureKind::SimplexMixture: return "simplex_mixture";
        case MeasureKind::Gaussian: return "gaussian";
        case MeasureKind::UniformBall: return "uniform_ball";
        case MeasureKind::CrossPolytope: return "cross_polytope";
        case MeasureKind::PointMasses: return "point_masses";
        case MeasureKind::File: return "file";
    }
    return "?";
}

double MeasureSpec::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::vector<Vec> simplex_vertices(int dim) {
    // Centred standard basis of R^{d+1}, expressed in a Helmert basis of the sum-zero hyperplane.
    const int m = dim + 1;
    Mat H(m, dim);
    for (int j = 0; j < dim; ++j) {
        double c = 1.0 / std::sqrt(double(j + 1) * (j + 2));
        for (int i = 0; i <= j; ++i) H(i, j) = c;
        H(j + 1, j) = -(j + 1) * c;
        for (int i = j + 2; i < m; ++i) H(i, j) = 0.0;
    }
    std::vector<Vec> out;
    for (int i = 0; i < m; ++i) {
        Vec e = Vec::Zero(m);
        e[i] = 1.0;
        e.array() -= 1.0 / m;
        Vec v = H.transpose() * e;
        out.push_back(v.normalized());
    }
    return out;
}

DiscreteMeasure generate_measure(const MeasureSpec& spec) {
    if (spec.kind == MeasureKind::PointMasses) {
        std::vector<double> w = spec.weights.empty() ? std::vector<double>(spec.points.size(), 1.0) : spec.weights;
        return make_measure(spec.points, w);
    }
    if (spec.kind == MeasureKind::File) return load_measure(spec.path);
    if (spec.dim < 1) fail(Kind::InvalidArgument, "generate_measure: dim must be >= 1");
    if (spec.n < 1) fail(Kind::InvalidArgument, "generate_measure: n must be >= 1");
    const int d = spec.dim;
    const int n = spec.n;
    const double sigma = spec.param("sigma", 0.01);
    const double radius = spec.param("radius", 1.0);
    if (!(sigma > 0.0)) fail(Kind::InvalidArgument, "generate_measure: sigma must be positive");
    if (!(radius > 0.0)) fail(Kind::InvalidArgument, "generate_measure: radius must be positive");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto gauss = [&](double s) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = s * g(rng);
        return v;
    };

    std::vector<Vec> pts;
    pts.reserve(n);
    switch (spec.kind) {
        case MeasureKind::SimplexMixture: {
            auto verts = simplex_vertices(d);
            for (int i = 0; i < n; ++i) pts.push_back(radius * verts[i % (d + 1)] + gauss(sigma));
            break;
        }
        case MeasureKind::Gaussian:
            for (int i = 0; i < n; ++i) pts.push_back(gauss(spec.param("scale", 1.0)));
            break;
        case MeasureKind::UniformBall:
            for (int i = 0; i < n; ++i) {
                Vec v = random_unit(d, rng);
                pts.push_back(radius * std::pow(u01(rng), 1.0 / d) * v);
            }
            break;
        case MeasureKind::CrossPolytope:
            for (int i = 0; i < n; ++i) {
                int k = i % (2 * d);
                Vec c = Vec::Zero(d);
                c[k / 2] = (k % 2 == 0) ? radius : -radius;
                pts.push_back(c + gauss(sigma));
            }
            break;
        default:
            fail(Kind::InvalidArgument, "generate_measure: unsupported kind");
    }
    return make_measure(pts, std::vector<double>(n, 1.0));
}

DiscreteMeasure project_measure(const DiscreteMeasure& m, const Flat& f) {
    if (f.ambient() != m.dim()) fail(Kind::DimensionMismatch, "project_measure: dimension mismatch");
    Mat C = complement_basis(f);
    std::vector<Vec> pts;
    pts.reserve(m.size());
    for (const auto& p : m.points()) pts.push_back(project_point(p, C));
    return DiscreteMeasure(static_cast<int>(C.cols()), std::move(pts), m.weights());
}

double halfspace_mass(const DiscreteMeasure& m, const HalfSpace& h, double tol) {
    if (h.normal.dim() != m.dim()) fail(Kind::DimensionMismatch, "halfspace_mass: dimension mismatch");
    const Vec& n = h.normal.vec();
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i)
        if (n.dot(m.point(i)) - h.offset <= tol) s += m.weight(i);
    return std::min(1.0, s);
}

double cone_mass(const DiscreteMeasure& m, const SimplicialCone& B, double tol) {
    if (B.dim() != m.dim()) fail(Kind::DimensionMismatch, "cone_mass: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i)
        if (cone_contains(B, m.point(i), tol)) s += m.weight(i);
    return std::min(1.0, s);
}

DiscreteMeasure measure_from_json_text(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line number for the message.
        size_t line = 1;
        for (size_t i = 0; i < std::min<size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        std::ostringstream os;
        os << origin << ": malformed JSON at line " << line << ": " << e.what();
        fail(Kind::Io, os.str());
    }
    auto bad = [&](const std::string& msg) { fail(Kind::Io, origin + ": " + msg); };
    if (!j.is_object()) bad("expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) bad("field 'dim' missing or not an integer");
    const int dim = j["dim"].get<int>();
    if (dim < 1) bad("field 'dim' must be >= 1");
    if (!j.contains("points") || !j["points"].is_array()) bad("field 'points' missing or not an array");
    const auto& jp = j["points"];
    if (jp.empty()) bad("field 'points' is empty");
    std::vector<Vec> pts;
    for (size_t i = 0; i < jp.size(); ++i) {
        const auto& row = jp[i];
        if (!row.is_array()) bad("points[" + std::to_string(i) + "] is not an array");
        if (static_cast<int>(row.size()) != dim)
            bad("points[" + std::to_string(i) + "] has " + std::to_string(row.size()) + " coordinates, expected " +
                std::to_string(dim));
        Vec v(dim);
        for (int k = 0; k < dim; ++k) {
            if (!row[k].is_number()) bad("points[" + std::to_string(i) + "][" + std::to_string(k) + "] is not a number");
            v[k] = row[k].get<double>();
        }
        pts.push_back(v);
    }
    std::vector<double> w;
    if (j.contains("weights")) {
        const auto& jw = j["weights"];
        if (!jw.is_array()) bad("field 'weights' is not an array");
        if (jw.size() != pts.size())
            bad("field 'weights' has " + std::to_string(jw.size()) + " entries, expected " + std::to_string(pts.size()));
        double s = 0.0;
        for (size_t i = 0; i < jw.size(); ++i) {
            if (!jw[i].is_number()) bad("weights[" + std::to_string(i) + "] is not a number");
            double x = jw[i].get<double>();
            if (!(x > 0.0)) bad("weights[" + std::to_string(i) + "] must be positive");
            w.push_back(x);
            s += x;
        }
        if (std::abs(s - 1.0) > 1e-9) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", s);
            bad(std::string("weights sum to ") + buf + ", expected 1");
        }
        if (std::abs(s - 1.0) > 1e-12) return make_measure(pts, w);
    } else {
        return make_measure(pts, std::vector<double>(pts.size(), 1.0));
    }
    return DiscreteMeasure(dim, std::move(pts), std::move(w));
}

std::string measure_to_json_text(const DiscreteMeasure& m) {
    std::string out;
    char buf[40];
    out += "{\"dim\": " + std::to_string(m.dim()) + ", \"points\": [";
    for (size_t i = 0; i < m.size(); ++i) {
        out += i ? ",\n  [" : "\n  [";
        for (int k = 0; k < m.dim(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", m.point(i)[k]);
            if (k) out += ", ";
            out += buf;
        }
        out += "]";
    }
    out += "],\n \"weights\": [";
    for (size_t i = 0; i < m.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", m.weight(i));
        if (i) out += ", ";
        out += buf;
    }
    out += "]}\n";
    return out;
}

DiscreteMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Kind::Io, "cannot open measure file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return measure_from_json_text(ss.str(), path);
}

void save_measure(const DiscreteMeasure& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Kind::Io, "cannot write measure file '" + path + "'");
    out << measure_to_json_text(m);
    if (!out) fail(Kind::Io, "write failed for '" + path + "'");
}

}  // namespace depthlab
