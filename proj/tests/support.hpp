#pragma once

#include "mixedgreen/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace mixedgreen::testing {

inline std::filesystem::path data_path(const std::string& relative) {
    return std::filesystem::path(MIXEDGREEN_DATA_DIR) / relative;
}

inline DomainSpec load_domain(const std::string& relative) {
    return parse_domain_text(read_file(data_path(relative)));
}

/// Domain, decomposition and a Taylor–Hood space on it; members stay at fixed addresses.
struct Setup {
    std::unique_ptr<PolygonalDomain> domain;
    std::unique_ptr<BoundaryDecomposition> decomposition;
    std::shared_ptr<const FESpace> space;

    [[nodiscard]] const PolygonalDomain& dom() const { return *domain; }
    [[nodiscard]] const BoundaryDecomposition& dec() const { return *decomposition; }
};

inline std::shared_ptr<const FESpace> make_space(const PolygonalDomain& domain,
                                                 const BoundaryDecomposition& decomposition, double h,
                                                 int pressure_order = 1) {
    return std::make_shared<FESpace>(std::make_shared<TriangleMesh>(triangulate(domain, decomposition, h)),
                                     pressure_order);
}

inline std::vector<Vec2> unit_square_vertices() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

/// Unit square with whole edges in D (0 bottom, 1 right, 2 top, 3 left), M = 4, R0 = 0.5.
inline Setup unit_square(std::vector<std::size_t> dirichlet_edges, double h, double R0 = 0.5) {
    Setup s;
    s.domain = std::make_unique<PolygonalDomain>(unit_square_vertices(), 4.0, R0);
    s.decomposition = std::make_unique<BoundaryDecomposition>(
        BoundaryDecomposition::from_edges(*s.domain, dirichlet_edges));
    if (h > 0.0) s.space = make_space(*s.domain, *s.decomposition, h);
    return s;
}

inline Setup from_file(const std::string& relative, double h) {
    DomainSpec spec = load_domain(relative);
    Setup s;
    s.domain = std::move(spec.domain);
    s.decomposition = std::move(spec.decomposition);
    if (h > 0.0) s.space = make_space(*s.domain, *s.decomposition, h);
    return s;
}

/// Weak-L² quasinorm of min(|y|^{-1}, T) on a polygonal unit disk, mesh graded
/// toward 0, with T = 1/(4 h_local) the resolved scale at the singularity. For
/// every T ≥ 1 the exact value is √π.
inline double inverse_distance_weak_norm(double h, int sides, int grading) {
    std::vector<Vec2> circle;
    for (int k = 0; k < sides; ++k) circle.emplace_back(std::cos(2 * kPi * k / sides), std::sin(2 * kPi * k / sides));
    const PolygonalDomain disk(circle, 4.0, 0.1);
    const auto dec = BoundaryDecomposition::uniform(disk, BoundaryLabel::Dirichlet);
    const TriangleMesh mesh = graded_refine_toward(triangulate(disk, dec, h), Vec2::Zero(), grading);
    const FESpace space(std::make_shared<TriangleMesh>(mesh));
    const double cap = 1.0 / (4.0 * space.locator().local_h(Vec2::Zero()));
    const RegionQuadrature quad = domain_quadrature(space);
    WeightedSamples s;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        s.values.push_back(std::min(1.0 / quad.point[i].norm(), cap));
        s.weights.push_back(quad.weight[i]);
    }
    return weak_lebesgue_norm(s, 2.0);
}

inline const std::vector<std::string>& shipped_domains() {
    static const std::vector<std::string> names{"domains/unit_square.json", "domains/square_top_bottom.json",
                                                "domains/l_shape.json", "domains/hexagon.json"};
    return names;
}

}  // namespace mixedgreen::testing
