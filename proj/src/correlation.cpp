#include "alaw/correlation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "alaw/entropy.hpp"
#include "alaw/errors.hpp"

namespace alaw {

namespace {

// rho^X x rho^Y laid out in the sorted-union basis of the two supports.
Matrix product_in_union_basis(const Matrix& rx, const Matrix& ry,
                              const Region& x, const Region& y, const Region& un) {
    std::vector<int> posx, posy;
    for (int s : x.sites)
        posx.push_back(static_cast<int>(std::lower_bound(un.sites.begin(), un.sites.end(), s) -
                                        un.sites.begin()));
    for (int s : y.sites)
        posy.push_back(static_cast<int>(std::lower_bound(un.sites.begin(), un.sites.end(), s) -
                                        un.sites.begin()));
    const Eigen::Index dim = Eigen::Index(1) << un.size();
    Matrix prod(dim, dim);
    auto part = [](Eigen::Index u, const std::vector<int>& pos) {
        Eigen::Index v = 0;
        for (size_t j = 0; j < pos.size(); ++j) v |= ((u >> pos[j]) & 1) << j;
        return v;
    };
    for (Eigen::Index u = 0; u < dim; ++u)
        for (Eigen::Index up = 0; up < dim; ++up)
            prod(u, up) = rx(part(u, posx), part(up, posx)) * ry(part(u, posy), part(up, posy));
    return prod;
}

}  // namespace

double correlation_strength(const ChainState& state, const Region& x, const Region& y) {
    if (x.empty() || y.empty())
        throw PreconditionError("correlation_strength: empty support");
    if (x.size() > 2 || y.size() > 2)
        throw PreconditionError("correlation_strength: supports limited to two sites");
    if (!x.disjoint_from(y))
        throw PreconditionError("correlation_strength: supports overlap");
    const Region un = x.joined(y);
    const Matrix rxy = reduce(state, un).rho;
    const Matrix rx = reduce(state, x).rho;
    const Matrix ry = reduce(state, y).rho;
    const Matrix prod = product_in_union_basis(rx, ry, x, y, un);
    return 2.0 * trace_distance(rxy, prod);
}

CorrelationProfile measure_profile(const ChainState& state, int region_size) {
    if (region_size < 1 || region_size > 2)
        throw PreconditionError("measure_profile: region size must be 1 or 2");
    state.validate();
    const int n = state.num_sites;
    CorrelationProfile prof;
    prof.region_size = region_size;
    // region_size names the larger support; size-2 profiles include the mixed
    // (1,2) pairs, which chain-edge placements do not reduce to (2,2) pairs
    std::vector<std::pair<int, int>> shapes;
    if (region_size == 1)
        shapes = {{1, 1}};
    else
        shapes = {{2, 2}, {1, 2}, {2, 1}};
    std::map<int, double> worst;
    for (const auto& [wx, wy] : shapes) {
        for (int a = 0; a + wx <= n; ++a) {
            for (int b = a + wx + 1; b + wy <= n; ++b) {
                const int sep = b - (a + wx);
                if (sep < 1) continue;
                const double s = correlation_strength(state, Region::contiguous(a, wx),
                                                      Region::contiguous(b, wy));
                auto [it, fresh] = worst.try_emplace(sep, s);
                if (!fresh) it->second = std::max(it->second, s);
            }
        }
    }
    for (const auto& [sep, s] : worst) {
        prof.separations.push_back(sep);
        prof.strengths.push_back(s);
    }
    return prof;
}

XiFit fit_xi(const std::vector<CorrelationProfile>& profiles, bool poly_prefactor) {
    XiFit fit;
    fit.poly_prefactor = poly_prefactor;
    std::vector<std::pair<double, double>> pts;  // (l, log2 s) for s above floor
    std::vector<std::pair<int, double>> all;     // every measured point
    for (const auto& prof : profiles) {
        for (size_t i = 0; i < prof.separations.size(); ++i) {
            all.emplace_back(prof.separations[i], prof.strengths[i]);
            if (prof.strengths[i] > 1e-12)
                pts.emplace_back(prof.separations[i], std::log2(prof.strengths[i]));
        }
    }
    fit.points_used = static_cast<int>(pts.size());

    if (pts.empty()) {
        // zero-correlation family: any decay length works; report the floor
        fit.xi_hat = 1.0;
        fit.certified = true;
        return fit;
    }
    if (pts.size() < 3) {
        fit.xi_hat = 1.0;
        fit.certified = false;  // too few points to fit, not provably zero
        return fit;
    }

    // least squares on log2(strength) = intercept + slope*l (+ power*log2 l)
    const int cols = poly_prefactor ? 3 : 2;
    Eigen::MatrixXd design(pts.size(), cols);
    Eigen::VectorXd target(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        design(i, 0) = pts[i].first;
        design(i, 1) = 1.0;
        if (poly_prefactor) design(i, 2) = std::log2(pts[i].first);
        target(i) = pts[i].second;
    }
    Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    fit.slope = beta(0);
    fit.intercept = beta(1);
    if (poly_prefactor) {
        fit.poly_log2_scale = beta(1);
        fit.poly_power = beta(2);
    }
    fit.fit_residual = std::sqrt((design * beta - target).squaredNorm() /
                                 static_cast<double>(pts.size()));

    if (fit.slope >= 0.0) {
        fit.xi_hat = 1e6;  // no measurable decay; certification below will fail
    } else {
        fit.xi_hat = std::max(1.0, 1.5 * (-1.0 / fit.slope));
    }

    fit.certified = true;
    for (const auto& [l, s] : all) {
        double envelope = std::pow(2.0, -static_cast<double>(l) / fit.xi_hat);
        if (poly_prefactor)
            envelope *= std::pow(2.0, fit.poly_log2_scale) *
                        std::pow(static_cast<double>(l), fit.poly_power);
        if (s > envelope + 1e-15) {
            fit.certified = false;
            break;
        }
    }
    // the prefactor-free bounds stay sound only if the fitted prefactor never
    // exceeds one on the measured range
    if (poly_prefactor && fit.certified) {
        for (const auto& [l, s] : all) {
            const double pref = std::pow(2.0, fit.poly_log2_scale) *
                                std::pow(static_cast<double>(l), fit.poly_power);
            if (pref > 1.0 + 1e-12) {
                fit.certified = false;
                break;
            }
        }
    }
    return fit;
}

XiFit fit_xi(const CorrelationProfile& profile) {
    return fit_xi(std::vector<CorrelationProfile>{profile}, false);
}

CorrelationCertificate certify_state(const ChainState& state, bool poly_prefactor) {
    CorrelationCertificate cert;
    cert.profiles.push_back(measure_profile(state, 1));
    if (state.num_sites >= 5) cert.profiles.push_back(measure_profile(state, 2));
    cert.fit = fit_xi(cert.profiles, poly_prefactor);
    cert.xi = cert.fit.xi_hat;
    cert.certified = cert.fit.certified;
    return cert;
}

CorrelationCertificate certify_with_override(const ChainState& state, double xi) {
    if (xi < 1.0) throw PreconditionError("xi override must be >= 1");
    CorrelationCertificate cert;
    cert.profiles.push_back(measure_profile(state, 1));
    if (state.num_sites >= 5) cert.profiles.push_back(measure_profile(state, 2));
    for (const auto& prof : cert.profiles)
        for (double s : prof.strengths)
            if (s > 1e-12)
                throw PreconditionError(
                    "xi override rejected: state has measurable correlations at separation >= 1");
    cert.fit = fit_xi(cert.profiles, false);
    cert.xi = xi;
    cert.certified = true;
    cert.overridden = true;
    return cert;
}

std::string profiles_to_csv(const std::vector<CorrelationProfile>& profiles) {
    std::string out = "separation,strength,region_size\n";
    char buf[64];
    for (const auto& prof : profiles) {
        for (size_t i = 0; i < prof.separations.size(); ++i) {
            out += std::to_string(prof.separations[i]);
            out += ',';
            auto res = std::to_chars(buf, buf + sizeof(buf), prof.strengths[i],
                                     std::chars_format::general, 17);
            out.append(buf, res.ptr);
            out += ',';
            out += std::to_string(prof.region_size);
            out += '\n';
        }
    }
    return out;
}

}  // namespace alaw
