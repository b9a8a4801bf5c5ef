#include "doctest.h"
#include "oracles.hpp"

#include <random>

#include "slimegate/fields.hpp"

using namespace slimegate;

namespace {

Scene small_dish() {
    Scene s;
    s.dish_diameter = 16.0;
    s.attractants = {{{2.3, -1.7}, 1.0, "oat flake"}, {{-3.0, 3.0}, 0.5, "oat flake"}};
    return s;
}

}  // namespace

TEST_CASE("emission weights are bilinear and sum to one") {
    const Scene s = small_dish();
    const GridSpec spec = grid_for(s, 1.0);
    const CellMap cells = CellMap::build(s, spec);
    const auto w = emission_weights(cells, {2.3, -1.7});
    double total = 0.0;
    for (const auto& [k, v] : w) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.size() == 4);
    // A source on a cell centre lands entirely on that cell.
    const Vec2 c = spec.cell_center(8, 8);
    const auto one = emission_weights(cells, c);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == spec.index(8, 8));
}

TEST_CASE("diffusion matches the dense matrix oracle") {
    const Scene s = small_dish();
    for (double cpm : {1.0, 2.0}) {
        const GridSpec spec = grid_for(s, cpm);
        const CellMap cells = CellMap::build(s, spec);
        const DiffusionParams params{0.2, 0.01};
        const auto dense = oracle::dense_diffusion(s, spec, params.coefficient, params.decay);

        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Grid g(spec);
        Eigen::VectorXd x(dense.cells.size());
        for (std::size_t r = 0; r < dense.cells.size(); ++r) x(r) = g.values[dense.cells[r]] = u(gen);

        diffuse_attractant_in_place(g, cells, s, 37, params);
        for (int n = 0; n < 37; ++n) x = dense.step * x + dense.source;
        double worst = 0.0;
        for (std::size_t r = 0; r < dense.cells.size(); ++r) worst = std::max(worst, std::abs(g.values[dense.cells[r]] - x(r)));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("diffusion approaches the steady state (I - M)^-1 s") {
    const Scene s = small_dish();
    const GridSpec spec = grid_for(s, 1.0);
    const CellMap cells = CellMap::build(s, spec);
    const DiffusionParams params{0.2, 0.02};
    const auto dense = oracle::dense_diffusion(s, spec, params.coefficient, params.decay);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dense.step.rows(), dense.step.cols()) - dense.step;
    const Eigen::VectorXd steady = a.partialPivLu().solve(dense.source);
    Grid g(spec);
    diffuse_attractant_in_place(g, cells, s, 5000, params);
    for (std::size_t r = 0; r < dense.cells.size(); ++r) {
        CHECK(g.values[dense.cells[r]] == doctest::Approx(steady(r)).epsilon(1e-8));
    }
}

TEST_CASE("without decay or sources diffusion conserves mass and stays non-negative") {
    Scene s = small_dish();
    s.attractants.clear();
    const GridSpec spec = grid_for(s, 1.0);
    const CellMap cells = CellMap::build(s, spec);
    Grid g(spec);
    g.at(8, 8) = 100.0;
    diffuse_attractant_in_place(g, cells, s, 500, {0.2, 0.0});
    CHECK(g.sum() == doctest::Approx(100.0).epsilon(1e-12));
    for (double v : g.values) CHECK(v >= 0.0);
}

TEST_CASE("ray transmission multiplies crossed barriers") {
    Scene s;
    Barrier b1;
    b1.segment = {{0.0, -10.0}, {0.0, 10.0}};
    b1.light_transmission = 0.1;
    Barrier b2 = b1;
    b2.segment = {{5.0, -10.0}, {5.0, 10.0}};
    b2.light_transmission = 0.5;
    s.barriers = {b1, b2};
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int n = 0; n < 2000; ++n) {
        const Vec2 a{u(gen), u(gen)};
        const Vec2 b{u(gen), u(gen)};
        double expected = 1.0;
        for (const auto& bar : s.barriers) {
            if (oracle::segments_cross(a, b, bar.segment.a, bar.segment.b)) expected *= bar.light_transmission;
        }
        CHECK(ray_transmission(s, a, b) == doctest::Approx(expected));
    }
}

TEST_CASE("light falloff and phobia interpolation") {
    CHECK(light_falloff(0.0, 12.0) == 1.0);
    CHECK(light_falloff(12.0, 12.0) == doctest::Approx(0.5));
    const Calibration c;
    CHECK(phobia_weight(466.0, c) == c.phobia[0].weight);
    CHECK(phobia_weight(400.0, c) == c.phobia[0].weight);
    CHECK(phobia_weight(700.0, c) == c.phobia[3].weight);
    const double mid = 0.5 * (c.phobia[1].wavelength + c.phobia[2].wavelength);
    CHECK(phobia_weight(mid, c) == doctest::Approx(0.5 * (c.phobia[1].weight + c.phobia[2].weight)));
}

TEST_CASE("irradiance follows LED state and the barrier shadow") {
    Scene s;
    s.leds = {{"L", {10.0, 0.0}, 568.0, 1000.0, "A"}};
    Barrier b;
    b.segment = {{0.0, -30.0}, {0.0, 30.0}};
    s.barriers = {b};
    const Calibration c;
    const GridSpec spec = grid_for(s, 1.0);
    const CellMap cells = CellMap::build(s, spec);
    const auto dark = compute_irradiance(s, spec, cells, {{"A", false}}, c);
    CHECK(dark[0].sum() == 0.0);
    const auto lit = compute_irradiance(s, spec, cells, {{"A", true}}, c);
    const double near = lit[0].sample({5.0, 0.0});
    const double mirrored = lit[0].sample({-5.0, 0.0});
    CHECK(near > 0.0);
    // Same distance from the LED would be 15 mm; the card cuts it further.
    CHECK(mirrored < near * b.light_transmission);
}

TEST_CASE("moisture decays with time and faster for small blobs") {
    const Calibration c;
    AgarBlob big;
    big.volume = 4.0;
    AgarBlob small;
    small.volume = 1.0;
    CHECK(blob_moisture(big, 0.0, c) == big.initial_moisture);
    CHECK(blob_moisture(big, 1000.0, c) < blob_moisture(big, 0.0, c));
    CHECK(blob_moisture(small, 1000.0, c) < blob_moisture(big, 1000.0, c));
    CHECK(moisture_decay_rate(small, c) > moisture_decay_rate(big, c));
}

TEST_CASE("grid text export has one line per row") {
    GridSpec spec;
    spec.width = 3;
    spec.height = 2;
    Grid g(spec);
    g.at(0, 1) = 1.0;
    const std::string text = grid_to_text(g);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.rfind("1", 0) == 0);  // top row first
}
