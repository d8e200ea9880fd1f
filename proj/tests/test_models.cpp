#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "bandtouch/model.hpp"

using namespace bandtouch;
using std::numbers::pi;

namespace {

// test-side finite-difference oracle for hamiltonian_derivative
HermitianMatrix2 fd_derivative(const ModelSpec& model, double lambda,
                               double step = 1e-5) {
    const HermitianMatrix2 hp = eval_hamiltonian(model, lambda + step);
    const HermitianMatrix2 hm = eval_hamiltonian(model, lambda - step);
    return {(hp.h00 - hm.h00) / (2.0 * step), (hp.h11 - hm.h11) / (2.0 * step),
            (hp.h01 - hm.h01) / (2.0 * step)};
}

double entry_distance(const HermitianMatrix2& x, const HermitianMatrix2& y) {
    return std::max({std::abs(x.h00 - y.h00), std::abs(x.h11 - y.h11),
                     std::abs(x.h01 - y.h01)});
}

const std::vector<ModelSpec> kAllFamilies = {
    PWave{0.7, cplx(0.4, 0.3)},
    GrapheneQuadratic{1.3, 0.8},
    GrapheneTightBinding{1.0, 1.0},
    PolyDiag{{0.2, -0.5, 1.1, 0.3}, 0.6},
    GL{4, 0.5},
    GP{3, 0.25},
};

}  // namespace

TEST_CASE("eval_hamiltonian matches the family definitions") {
    const HermitianMatrix2 zero = eval_hamiltonian(GL{2, 0.5}, 0.0);
    CHECK(zero.h00 == 0.0);
    CHECK(zero.h11 == 0.0);
    CHECK(zero.h01 == cplx(0.0));

    const HermitianMatrix2 gl = eval_hamiltonian(GL{2, 0.5}, 1.0);
    CHECK(gl.h00 == doctest::Approx(1.0));
    CHECK(gl.h11 == doctest::Approx(-1.0));
    CHECK(gl.h01.real() == doctest::Approx(0.5));

    const HermitianMatrix2 gp = eval_hamiltonian(GP{1, 0.3}, 2.0);
    CHECK(gp.h00 == doctest::Approx(2.0));
    CHECK(gp.h11 == doctest::Approx(-2.0));
    CHECK(gp.h01.real() == doctest::Approx(0.3));
}

TEST_CASE("gp with n=1 is the Landau-Zener Hamiltonian") {
    for (double lam : {-3.0, -0.4, 0.0, 1.7}) {
        const HermitianMatrix2 h = eval_hamiltonian(GP{1, 0.3}, lam);
        CHECK(h.h00 == lam);
        CHECK(h.h11 == -lam);
        CHECK(h.h01 == cplx(0.3));
    }
}

TEST_CASE("hamiltonian_derivative examples") {
    const HermitianMatrix2 d = hamiltonian_derivative(GL{2, 0.5}, 1.0);
    CHECK(d.h00 == doctest::Approx(2.0));
    CHECK(d.h11 == doctest::Approx(-2.0));
    CHECK(d.h01.real() == doctest::Approx(0.5));

    const HermitianMatrix2 z = hamiltonian_derivative(GP{4, 0.5}, 0.0);
    CHECK(z.h00 == 0.0);
    CHECK(z.h11 == 0.0);
    CHECK(z.h01 == cplx(0.0));
}

TEST_CASE("hamiltonian_derivative agrees with central finite differences") {
    for (const ModelSpec& model : kAllFamilies) {
        for (int i = 0; i <= 20; ++i) {
            const double lam = -5.0 + 0.5 * i;
            const HermitianMatrix2 d = hamiltonian_derivative(model, lam);
            const HermitianMatrix2 fd = fd_derivative(model, lam);
            const double scale =
                std::max(1.0, std::max(d.frobenius_norm(), fd.frobenius_norm()));
            CHECK(entry_distance(d, fd) / scale <= 1e-8);
        }
    }
}

TEST_CASE("eigensystem closed form and gauge") {
    SUBCASE("diagonal") {
        const EigenSystem es = eigensystem({1.0, -1.0, cplx(0.0)});
        CHECK(es.e_ground == doctest::Approx(-1.0));
        CHECK(es.e_excited == doctest::Approx(1.0));
        CHECK(es.v_ground.a == cplx(0.0));
        CHECK(es.v_ground.b == cplx(1.0));
        CHECK(es.v_excited.a == cplx(1.0));
    }
    SUBCASE("sigma_x tie-break gauge") {
        const EigenSystem es = eigensystem({0.0, 0.0, cplx(1.0)});
        CHECK(es.e_ground == doctest::Approx(-1.0));
        CHECK(es.v_ground.a.real() == doctest::Approx(std::sqrt(0.5)));
        CHECK(es.v_ground.b.real() == doctest::Approx(-std::sqrt(0.5)));
        CHECK(es.v_excited.a.real() == doctest::Approx(std::sqrt(0.5)));
        CHECK(es.v_excited.b.real() == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("zero matrix flagged degenerate") {
        CHECK(eigensystem({0.0, 0.0, cplx(0.0)}).degenerate);
    }
}

TEST_CASE("eigensystem invariants on random Hermitian matrices") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const HermitianMatrix2 h{u(rng), u(rng), cplx(u(rng), u(rng))};
        const EigenSystem es = eigensystem(h);
        CHECK(es.e_ground <= es.e_excited);

        CHECK(std::abs(norm(es.v_ground) - 1.0) <= 1e-12);
        CHECK(std::abs(norm(es.v_excited) - 1.0) <= 1e-12);
        CHECK(std::abs(inner(es.v_ground, es.v_excited)) <= 1e-12);

        const double bound = 1e-12 * std::max(1.0, h.frobenius_norm());
        const Vec2 rg = h.apply(es.v_ground);
        CHECK(std::abs(rg.a - es.e_ground * es.v_ground.a) <= bound);
        CHECK(std::abs(rg.b - es.e_ground * es.v_ground.b) <= bound);
        const Vec2 re = h.apply(es.v_excited);
        CHECK(std::abs(re.a - es.e_excited * es.v_excited.a) <= bound);
        CHECK(std::abs(re.b - es.e_excited * es.v_excited.b) <= bound);

        // gauge: dominant component real positive
        for (const Vec2* v : {&es.v_ground, &es.v_excited}) {
            const cplx dominant =
                std::abs(v->b) > std::abs(v->a) ? v->b : v->a;
            CHECK(dominant.real() > 0.0);
            CHECK(std::abs(dominant.imag()) <= 1e-12);
        }
    }
}

TEST_CASE("traceless families and GL odd antisymmetry") {
    for (const ModelSpec& model : kAllFamilies) {
        if (std::holds_alternative<GrapheneTightBinding>(model)) {
            continue;
        }
        for (double lam : {-2.0, -0.3, 0.9}) {
            const HermitianMatrix2 h = eval_hamiltonian(model, lam);
            CHECK(h.h00 + h.h11 == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    const ModelSpec odd = GL{5, 0.7};
    for (double lam : {0.3, 1.2, 2.8}) {
        const HermitianMatrix2 hp = eval_hamiltonian(odd, lam);
        const HermitianMatrix2 hm = eval_hamiltonian(odd, -lam);
        CHECK(hm.h00 == doctest::Approx(-hp.h00));
        CHECK(hm.h01.real() == doctest::Approx(-hp.h01.real()));
    }
}

TEST_CASE("graphene structure factor") {
    const GrapheneTightBinding tb{1.0, 1.0};
    const double kx = 2.0 * pi / 3.0;
    const double ky = 2.0 * pi / (3.0 * std::sqrt(3.0));

    CHECK(std::abs(graphene_structure_factor(tb, kx, ky)) <= 1e-12);
    CHECK(std::abs(graphene_structure_factor(tb, 0.0, 0.0) - cplx(-3.0)) <=
          1e-12);

    // residual against the quadratic expansion is third order in q
    for (double q : {0.1, 0.01, 0.001}) {
        const cplx s = graphene_structure_factor(tb, kx + q, ky);
        const cplx s2 = graphene_structure_factor_quadratic(tb, q);
        CHECK(std::abs(s - s2) / (q * q * q) <= 0.25);
    }
}

TEST_CASE("graphene effective model") {
    const GrapheneTightBinding tb{1.0, 1.0};
    const ModelSpec eff = graphene_effective_model(tb);
    const auto& quad = std::get<GrapheneQuadratic>(eff);
    CHECK(quad.gamma() == doctest::Approx(0.75));

    const HermitianMatrix2 zero = eval_hamiltonian(eff, 0.0);
    CHECK(zero.frobenius_norm() == 0.0);

    // E(lambda) = +/- gamma |lambda| sqrt((a lambda / 2)^2 + 4)
    const EigenSystem es = eigensystem(eval_hamiltonian(eff, 1.0));
    CHECK(es.e_excited == doctest::Approx(0.75 * std::sqrt(4.25)).epsilon(1e-12));
    CHECK(es.e_ground == doctest::Approx(-0.75 * std::sqrt(4.25)).epsilon(1e-12));
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(validate(ModelSpec{GL{0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelSpec{GP{2, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelSpec{PWave{-1.0, cplx(1.0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelSpec{PolyDiag{{}, 1.0}}),
                    std::invalid_argument);
    for (const ModelSpec& model : kAllFamilies) {
        CHECK_NOTHROW(validate(model));
    }
}

TEST_CASE("model JSON round trip") {
    for (const ModelSpec& model : kAllFamilies) {
        const ModelSpec back = model_from_json(model_to_json(model));
        CHECK(family_name(back) == family_name(model));
        for (double lam : {-1.3, 0.0, 0.8}) {
            CHECK(entry_distance(eval_hamiltonian(back, lam),
                                 eval_hamiltonian(model, lam)) == 0.0);
        }
    }
    CHECK(model_to_json(GL{4, 0.5})["family"] == "gl");
    CHECK(model_to_json(GL{4, 0.5})["delta1"] == 0.5);
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"family", "nope"}}),
                    std::invalid_argument);
}
