#pragma once

namespace ebm {

// Fixed physical constants. Time is measured in years throughout; every
// right-hand side is multiplied by kSecondsPerYear.
inline constexpr double kStefanBoltzmann = 5.67e-8;   // W m^-2 K^-4
inline constexpr double kSolarConstant = 1367.0;      // W m^-2
inline constexpr double kMeanInsolation = kSolarConstant / 4.0;
inline constexpr double kSecondsPerYear = 3.1536e7;   // 60*60*24*365

// Coefficients of the heat capacity, emissivity, albedo, diffusion and
// insolation laws. Capacity coefficients are multiples of 1e8 J m^-2 K^-1.
struct CoefficientParams {
  double C1 = 3.14;
  double C2 = 1.15;
  double C3 = 0.08;
  double T_s = 263.15;  // ice switch temperature for albedo and capacity

  double eps1 = 0.5;
  double T_eps = 284.15;

  double alpha_max = 0.62;
  double alpha1 = 0.303;
  double alpha2 = 0.0779;
  double alpha3 = 1.5;
  double alpha4 = 0.5;
  double alpha_min = 0.275;  // 0-D ice-free albedo

  double k_diff = 0.591;  // W m^-2 K^-1

  double Q1 = 0.5294;
  double Q2 = 0.706;
};

}  // namespace ebm
