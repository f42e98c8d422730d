#pragma once

#include <string>
#include <vector>

namespace kgmv {

// Lower-order term W(s) = s^2/2 - s^p/p for s >= 0, extended by
// W(s) = s^2/2 for s < 0, so W = s^2/2 - F with F(s) = s^p/p on s >= 0
// and F = 0 on s < 0. Admissible frequencies satisfy
// omega^2 < min(1, (p-2)/2).
struct ModelParams {
    double omega = 0.0;
    int k = 0;
    double p = 4.0;
    double c_growth = 1.0;  // constant in |F'(s)| <= c s^{p-1}
};

double W(double s, const ModelParams& P);
double Wprime(double s, const ModelParams& P);
double Wsecond(double s, const ModelParams& P);
double F(double s, const ModelParams& P);
double Fprime(double s, const ModelParams& P);

// min(1, sqrt((p-2)/2)); throws std::domain_error for p outside (2,6).
double omega_p(double p);

// Every violated admissibility condition, as text; empty means ok.
std::vector<std::string> validate(const ModelParams& P);

}  // namespace kgmv
