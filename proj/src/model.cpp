#include "kgmv/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kgmv {

double W(double s, const ModelParams& P) {
    if (s < 0.0) return 0.5 * s * s;
    return 0.5 * s * s - std::pow(s, P.p) / P.p;
}

double Wprime(double s, const ModelParams& P) {
    if (s < 0.0) return s;
    return s - std::pow(s, P.p - 1.0);
}

double Wsecond(double s, const ModelParams& P) {
    if (s <= 0.0) return 1.0;
    return 1.0 - (P.p - 1.0) * std::pow(s, P.p - 2.0);
}

double F(double s, const ModelParams& P) {
    if (s <= 0.0) return 0.0;
    return std::pow(s, P.p) / P.p;
}

double Fprime(double s, const ModelParams& P) {
    if (s <= 0.0) return 0.0;
    return std::pow(s, P.p - 1.0);
}

double omega_p(double p) {
    if (!(p > 2.0) || !(p < 6.0)) throw std::domain_error("omega_p: p must lie in (2,6)");
    return std::min(1.0, std::sqrt((p - 2.0) / 2.0));
}

std::vector<std::string> validate(const ModelParams& P) {
    std::vector<std::string> bad;
    if (!(P.p > 2.0) || !(P.p < 6.0)) {
        std::ostringstream os;
        os << "p out of (2,6): p = " << P.p;
        bad.push_back(os.str());
        return bad;  // omega bound is meaningless without a valid p
    }
    const double w2 = P.omega * P.omega;
    if (w2 >= 1.0) {
        std::ostringstream os;
        os << "omega^2 >= 1 (" << w2 << " >= 1); need omega^2 < min(1,(p-2)/2)";
        bad.push_back(os.str());
    }
    const double half_pm2 = (P.p - 2.0) / 2.0;
    if (w2 >= half_pm2) {
        std::ostringstream os;
        os << "omega^2 >= (p-2)/2 (" << w2 << " >= " << half_pm2
           << "); need omega^2 < min(1,(p-2)/2)";
        bad.push_back(os.str());
    }
    if (!(P.c_growth > 0.0)) bad.push_back("c_growth must be positive");
    return bad;
}

}  // namespace kgmv
