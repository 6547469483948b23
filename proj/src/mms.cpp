#include "poromfe/mms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace poromfe {

namespace {

const std::vector<BoundaryTag> kVertical{BoundaryTag::Gamma1, BoundaryTag::Gamma3};
const std::vector<BoundaryTag> kHorizontal{BoundaryTag::Gamma2, BoundaryTag::Gamma4};
const std::vector<BoundaryTag> kAllSides{BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3,
                                         BoundaryTag::Gamma4};

}  // namespace

LoadData Scenario::load_data() const {
    LoadData d;
    d.body_force = body_force;
    d.flow_source = flow_source;
    d.traction = traction;
    d.flux = flux;
    for (int side = 0; side < 4; ++side) {
        const auto tag = static_cast<BoundaryTag>(side + 1);
        for (int c = 0; c < 2; ++c) {
            bool fixed = false;
            for (const auto& bc : u_dirichlet)
                if (bc.component == c && std::find(bc.tags.begin(), bc.tags.end(), tag) != bc.tags.end()) fixed = true;
            d.traction_active[side][c] = !fixed;
        }
        d.flux_active[side] =
            !p_dirichlet || std::find(p_dirichlet->tags.begin(), p_dirichlet->tags.end(), tag) == p_dirichlet->tags.end();
    }
    return d;
}

Scenario test1(const ModelParams& prm) {
    const double lambda = prm.lambda, mu = prm.mu, alpha = prm.alpha, c0 = prm.c0;
    const double k = prm.permeability(0, 0), mu_f = prm.mu_f;
    Scenario s;
    s.name = "test1";
    s.params = prm;
    s.exact_u = [](Point x, double t) { return Vec2{0.5 * t * x.x * x.x, 0.5 * t * x.y * x.y}; };
    s.exact_p = [](Point x, double t) { return t * std::exp(x.x + x.y); };
    s.exact_grad_u = [](Point x, double t) { return Mat2{{t * x.x, 0.0, 0.0, t * x.y}}; };
    s.exact_grad_p = [](Point x, double t) {
        const double v = t * std::exp(x.x + x.y);
        return Vec2{v, v};
    };
    s.body_force = [=](Point x, double t) {
        const double e = std::exp(x.x + x.y);
        return Vec2{-(lambda + mu) * t - 2 * (mu + lambda) * t * t * x.x + alpha * t * e,
                    -(lambda + mu) * t - 2 * (mu + lambda) * t * t * x.y + alpha * t * e};
    };
    s.flow_source = [=](Point x, double t) {
        const double e = std::exp(x.x + x.y);
        return c0 * e - 2 * k / mu_f * t * e + alpha * (x.x + x.y);
    };
    s.traction = [=](Point x, Vec2 n, double t) {
        const double e = std::exp(x.x + x.y);
        const double iso = lambda * (x.x + x.y) * t + lambda * t * t * (x.x * x.x + x.y * x.y) - alpha * t * e;
        return Vec2{iso * n.x + mu * t * x.x * n.x + mu * t * t * x.x * x.x * n.x,
                    iso * n.y + mu * t * x.y * n.y + mu * t * t * x.y * x.y * n.y};
    };
    s.u_dirichlet = {{0, kVertical, [](Point x, double t) { return 0.5 * x.x * x.x * t; }},
                     {1, kHorizontal, [](Point x, double t) { return 0.5 * x.y * x.y * t; }}};
    s.p_dirichlet = PressureDirichlet{kAllSides, s.exact_p};
    s.u0 = [](Point, double) { return Vec2{0.0, 0.0}; };
    s.p0 = [](Point, double) { return 0.0; };
    s.final_time = 1.0;
    return s;
}

Scenario test2(const ModelParams& prm) {
    const double lambda = prm.lambda, mu = prm.mu, alpha = prm.alpha, c0 = prm.c0;
    const double k = prm.permeability(0, 0), mu_f = prm.mu_f;
    Scenario s;
    s.name = "test2";
    s.params = prm;
    s.exact_u = [](Point x, double t) { return Vec2{0.5 * t * t * x.x * x.x, 0.5 * t * t * x.y * x.y}; };
    s.exact_p = [](Point x, double t) { return std::sin(x.x + x.y) * std::exp(t); };
    s.exact_grad_u = [](Point x, double t) { return Mat2{{t * t * x.x, 0.0, 0.0, t * t * x.y}}; };
    s.exact_grad_p = [](Point x, double t) {
        const double v = std::cos(x.x + x.y) * std::exp(t);
        return Vec2{v, v};
    };
    s.body_force = [=](Point x, double t) {
        const double t2 = t * t, t4 = t2 * t2;
        const double c = alpha * std::cos(x.x + x.y) * std::exp(t);
        return Vec2{-(lambda + mu) * t2 - 2 * (mu + lambda) * t4 * x.x + c,
                    -(lambda + mu) * t2 - 2 * (mu + lambda) * t4 * x.y + c};
    };
    s.flow_source = [=](Point x, double t) {
        return (c0 + 2 * k / mu_f) * std::sin(x.x + x.y) * std::exp(t) + 2 * t * alpha * (x.x + x.y);
    };
    s.traction = [=](Point x, Vec2 n, double t) {
        const double t2 = t * t, t4 = t2 * t2;
        const double iso = lambda * (x.x + x.y) * t2 + lambda * t4 * (x.x * x.x + x.y * x.y) -
                           alpha * std::sin(x.x + x.y) * std::exp(t);
        return Vec2{iso * n.x + mu * t2 * x.x * n.x + mu * t4 * x.x * x.x * n.x,
                    iso * n.y + mu * t2 * x.y * n.y + mu * t4 * x.y * x.y * n.y};
    };
    s.u_dirichlet = {{0, kVertical, [](Point x, double t) { return 0.5 * x.x * x.x * t * t; }},
                     {1, kHorizontal, [](Point x, double t) { return 0.5 * x.y * x.y * t * t; }}};
    s.p_dirichlet = PressureDirichlet{kAllSides, s.exact_p};
    s.u0 = [](Point, double) { return Vec2{0.0, 0.0}; };
    s.p0 = [](Point x, double) { return std::sin(x.x + x.y); };
    s.final_time = 1.0;
    return s;
}

Scenario pure_flux(const ModelParams& prm, double flow_source, double final_time) {
    Scenario s;
    s.name = "flux";
    s.params = prm;
    s.body_force = [](Point, double) { return Vec2{0.0, 0.0}; };
    s.flow_source = [flow_source](Point, double) { return flow_source; };
    s.traction = [](Point, Vec2, double) { return Vec2{0.0, 0.0}; };
    s.flux = [](Point, Vec2, double) { return 0.0; };
    s.u0 = [](Point, double) { return Vec2{0.0, 0.0}; };
    s.p0 = [](Point, double) { return 0.0; };
    s.final_time = final_time;
    return s;
}

Scenario make_scenario(std::string_view name, const ModelParams& params) {
    if (name == "test1") return test1(params);
    if (name == "test2") return test2(params);
    if (name == "flux") return pure_flux(params, 1.0);
    if (name == "zero") {
        Scenario s = pure_flux(params, 0.0);
        s.name = "zero";
        return s;
    }
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::vector<std::string> scenario_names() { return {"test1", "test2", "flux", "zero"}; }

ModelParams param_set(std::string_view name) {
    ModelParams p;
    if (name == "test1-soft") {
        p.lambda = 0.1, p.mu = 0.1, p.alpha = 1e-5, p.c0 = 2.0, p.permeability = 1e-3 * Mat2::identity();
    } else if (name == "test1-stiff") {
        p.lambda = 1e3, p.mu = 1e3, p.alpha = 1e-5, p.c0 = 1.0, p.permeability = 1e-3 * Mat2::identity();
    } else if (name == "test2-soft") {
        p.lambda = 0.1, p.mu = 10.0, p.alpha = 1e-4, p.c0 = 20.0, p.permeability = 0.1 * Mat2::identity();
    } else if (name == "test2-stiff") {
        p.lambda = 1e3, p.mu = 1e3, p.alpha = 1e-4, p.c0 = 0.01, p.permeability = 0.1 * Mat2::identity();
    } else {
        throw std::invalid_argument("unknown parameter set '" + std::string(name) + "'");
    }
    p.mu_f = 1.0;
    p.rho_f = 0.0;
    p.gravity = {0.0, 0.0};
    return p;
}

std::vector<std::string> param_set_names() { return {"test1-soft", "test1-stiff", "test2-soft", "test2-stiff"}; }

Mat2 green_stress(const Mat2& g, const ModelParams& p) {
    const Mat2 e = sym(g) + matmul(transpose(g), g);
    Mat2 s = p.mu * e;
    s(0, 0) += p.lambda * trace(e);
    s(1, 1) += p.lambda * trace(e);
    return s;
}

namespace {

constexpr double kStep = 1e-3;

// Fourth-order central difference of a one-variable function.
template <class F>
auto diff(F&& f, double x) {
    const double h = kStep;
    return (1.0 / (12.0 * h)) * (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h));
}

Mat2 fd_grad(const VectorField& u, Point x, double t) {
    const Vec2 dx = diff([&](double s) { return u({s, x.y}, t); }, x.x);
    const Vec2 dy = diff([&](double s) { return u({x.x, s}, t); }, x.y);
    return Mat2{{dx.x, dy.x, dx.y, dy.y}};
}

Vec2 fd_grad(const ScalarField& p, Point x, double t) {
    return {diff([&](double s) { return p({s, x.y}, t); }, x.x), diff([&](double s) { return p({x.x, s}, t); }, x.y)};
}

}  // namespace

AuditReport audit(const Scenario& sc, int samples, unsigned seed) {
    if (!sc.has_exact_solution()) throw std::invalid_argument("audit: scenario has no exact solution");
    const ModelParams& prm = sc.params;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coord(0.05, 0.95), time(0.1, sc.final_time);

    auto stress = [&](Point x, double t) { return green_stress(fd_grad(sc.exact_u, x, t), prm); };
    auto div_u = [&](Point x, double t) { return trace(fd_grad(sc.exact_u, x, t)); };

    double f_err = 0, f_ref = 0, phi_err = 0, phi_ref = 0, tr_err = 0, tr_ref = 0;
    for (int i = 0; i < samples; ++i) {
        const Point x{coord(rng), coord(rng)};
        const double t = time(rng);

        // -div sigma + alpha grad p
        const Mat2 sx = diff([&](double s) { return stress({s, x.y}, t); }, x.x);
        const Mat2 sy = diff([&](double s) { return stress({x.x, s}, t); }, x.y);
        const Vec2 gp = fd_grad(sc.exact_p, x, t);
        const Vec2 f_fd{-(sx(0, 0) + sy(0, 1)) + prm.alpha * gp.x, -(sx(1, 0) + sy(1, 1)) + prm.alpha * gp.y};
        const Vec2 f = sc.body_force(x, t);
        f_err = std::max(f_err, norm(f - f_fd));
        f_ref = std::max(f_ref, norm(f));

        // d/dt (c0 p + alpha div u) + div v_f, v_f = -(K/mu_f)(grad p - rho_f g)
        const double deta = diff([&](double s) { return prm.c0 * sc.exact_p(x, s) + prm.alpha * div_u(x, s); }, t);
        auto flux = [&](Point y) {
            return (-1.0 / prm.mu_f) *
                   matvec(prm.permeability, fd_grad(sc.exact_p, y, t) - prm.rho_f * prm.gravity);
        };
        const double div_flux = diff([&](double s) { return flux({s, x.y}).x; }, x.x) +
                                diff([&](double s) { return flux({x.x, s}).y; }, x.y);
        const double phi_fd = deta + div_flux;
        const double phi = sc.flow_source(x, t);
        phi_err = std::max(phi_err, std::abs(phi - phi_fd));
        phi_ref = std::max(phi_ref, std::abs(phi));

        if (sc.traction) {
            const double s = coord(rng);
            const std::array<std::pair<Point, Vec2>, 4> sides{{{{1.0, s}, {1, 0}},
                                                                {{s, 0.0}, {0, -1}},
                                                                {{0.0, s}, {-1, 0}},
                                                                {{s, 1.0}, {0, 1}}}};
            for (const auto& [y, n] : sides) {
                const Vec2 tr_fd = matvec(stress(y, t), n) - prm.alpha * sc.exact_p(y, t) * n;
                const Vec2 tr = sc.traction(y, n, t);
                tr_err = std::max(tr_err, norm(tr - tr_fd));
                tr_ref = std::max(tr_ref, norm(tr));
            }
        }
    }
    auto rel = [](double err, double ref) { return ref > 0 ? err / ref : err; };
    return {samples, rel(f_err, f_ref), rel(phi_err, phi_ref), rel(tr_err, tr_ref)};
}

}  // namespace poromfe
