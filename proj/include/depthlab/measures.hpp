#pragma once

#include "depthlab/geometry.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace depthlab {

// Finite weighted point set; weights positive and summing to one.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    DiscreteMeasure(int dim, std::vector<Vec> points, std::vector<double> weights);

    int dim() const { return dim_; }
    size_t size() const { return points_.size(); }
    const std::vector<Vec>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    const Vec& point(size_t i) const { return points_[i]; }
    double weight(size_t i) const { return weights_[i]; }

    DiscreteMeasure translated(const Vec& shift) const;
    DiscreteMeasure transformed(const Mat& linear) const;  // x -> A x
    DiscreteMeasure reweighted(const std::vector<double>& w) const;
    Vec mean() const;

private:
    int dim_ = 0;
    std::vector<Vec> points_;
    std::vector<double> weights_;
};

DiscreteMeasure make_measure(const std::vector<Vec>& points, const std::vector<double>& weights);

enum class MeasureKind { SimplexMixture, Gaussian, UniformBall, CrossPolytope, PointMasses, File };

MeasureKind parse_measure_kind(const std::string& s);
std::string to_string(MeasureKind k);

struct MeasureSpec {
    MeasureKind kind = MeasureKind::Gaussian;
    int dim = 2;
    int n = 100;
    std::uint64_t seed = 0;
    // sigma (cluster spread, default 0.01), radius (default 1).
    std::map<std::string, double> params;
    std::vector<Vec> points;       // point_masses
    std::vector<double> weights;   // point_masses (optional)
    std::string path;              // file

    double param(const std::string& key, double fallback) const;
};

DiscreteMeasure generate_measure(const MeasureSpec& spec);

// Vertices of a regular simplex centred at the origin with unit circumradius; d+1 rows.
std::vector<Vec> simplex_vertices(int dim);

DiscreteMeasure project_measure(const DiscreteMeasure& m, const Flat& f);

double halfspace_mass(const DiscreteMeasure& m, const HalfSpace& h, double tol = kDefaultTol);
double cone_mass(const DiscreteMeasure& m, const SimplicialCone& B, double tol = kDefaultTol);

DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& m, const std::string& path);
DiscreteMeasure measure_from_json_text(const std::string& text, const std::string& origin);
std::string measure_to_json_text(const DiscreteMeasure& m);

}  // namespace depthlab
