#pragma once

// Coefficient functions of the conditional second moments of the one-step
// innovations, as functions of the mean-reversion speed b. Each is an entire
// function of b; near b = 0 the closed forms cancel catastrophically, so they
// switch to Taylor polynomials (coefficients generated symbolically).

#include <array>
#include <cmath>

namespace heston_clse::detail {

inline constexpr std::array<double, 14> k1_series{1, -1.5, 1.1666666666666667, -0.625, 0.25833333333333336, -0.087499999999999994, 0.025198412698412699, -0.006324404761904762, 0.001408179012345679, -0.00028191137566137568, 5.1281665864999199e-05, -8.5490319865319862e-06, 1.3153962806740584e-06, -1.8792522512760608e-07};
inline constexpr std::array<double, 14> k2_series{0.5, -0.5, 0.29166666666666669, -0.125, 0.043055555555555555, -0.012500000000000001, 0.0031498015873015874, -0.00070271164021164017, 0.00014081790123456791, -2.5628306878306877e-05, 4.2734721554166002e-06, -6.5761784511784515e-07, 9.3956877191004172e-08, -1.2528348341840405e-08};
inline constexpr std::array<double, 14> k3a_series{0.33333333333333331, -0.33333333333333331, 0.18333333333333332, -0.072222222222222215, 0.022619047619047618, -0.0059523809523809521, 0.0013613315696649031, -0.00027667548500881836, 5.0755571588904921e-05, -8.5010154454598902e-06, 1.3113815197148531e-06, -1.8761551499646739e-07, 2.5035284625231715e-08, -3.1307488318070328e-09};
inline constexpr std::array<double, 14> k3b_series{-1, 0.66666666666666663, -0.25, 0.066666666666666666, -0.013888888888888888, 0.0023809523809523812, -0.00034722222222222224, 4.4091710758377428e-05, -4.9603174603174603e-06, 5.0104216770883435e-07, -4.592886537330982e-08, 3.8541705208371874e-09, -2.9823938554097286e-10, 2.1412058449095486e-11};
inline constexpr std::array<double, 14> k3c_series{1, -0.5, 0.16666666666666666, -0.041666666666666664, 0.0083333333333333332, -0.0013888888888888889, 0.00019841269841269841, -2.4801587301587302e-05, 2.7557319223985893e-06, -2.7557319223985888e-07, 2.505210838544172e-08, -2.08767569878681e-09, 1.6059043836821613e-10, -1.1470745597729725e-11};
inline constexpr std::array<double, 14> k4a_series{0.083333333333333329, -0.066666666666666666, 0.030555555555555555, -0.010317460317460317, 0.0028273809523809523, -0.00066137566137566134, 0.00013613315696649029, -2.5152316818983485e-05, 4.2296309657420768e-06, -6.5392426503537615e-07, 9.3670108551060934e-08, -1.2507700999764493e-08, 1.5647052890769822e-09, -1.84161695988649e-10};
inline constexpr std::array<double, 14> k4b_series{-0.33333333333333331, 0.16666666666666666, -0.050000000000000003, 0.011111111111111112, -0.001984126984126984, 0.00029761904761904765, -3.8580246913580246e-05, 4.4091710758377421e-06, -4.5093795093795094e-07, 4.17535139757362e-08, -3.5329896441007552e-09, 2.752978943455134e-10, -1.9882625702731522e-11, 1.3382536530684678e-12};
inline constexpr std::array<double, 14> k4c_series{0.5, -0.16666666666666666, 0.041666666666666664, -0.0083333333333333332, 0.0013888888888888889, -0.00019841269841269841, 2.4801587301587302e-05, -2.7557319223985893e-06, 2.7557319223985888e-07, -2.505210838544172e-08, 2.08767569878681e-09, -1.6059043836821613e-10, 1.1470745597729725e-11, -7.6471637318198164e-13};
inline constexpr std::array<double, 14> k5a_series{-0.5, 0.66666666666666663, -0.45833333333333331, 0.21666666666666667, -0.079166666666666663, 0.023809523809523808, -0.0061259920634920634, 0.0013833774250440918, -0.00027915564373897706, 5.1006092672759338e-05, -8.5239798781465453e-06, 1.3133086049752717e-06, -1.8776463468923787e-07, 2.5045990654456263e-08};
inline constexpr std::array<double, 14> k6a_series{-0.16666666666666666, 0.16666666666666666, -0.09166666666666666, 0.036111111111111108, -0.011309523809523809, 0.002976190476190476, -0.00068066578483245153, 0.00013833774250440918, -2.5377785794452461e-05, 4.2505077227299451e-06, -6.5569075985742654e-07, 9.3807757498233694e-08, -1.2517642312615858e-08, 1.5653744159035164e-09};
inline constexpr std::array<double, 14> k6b_series{0.5, -0.33333333333333331, 0.125, -0.033333333333333333, 0.0069444444444444441, -0.0011904761904761906, 0.00017361111111111112, -2.2045855379188714e-05, 2.4801587301587302e-06, -2.5052108385441718e-07, 2.296443268665491e-08, -1.9270852604185937e-09, 1.4911969277048643e-10, -1.0706029224547743e-11};

inline constexpr double kSmallB = 0.25;

template <std::size_t N>
double horner(const std::array<double, N>& coeffs, double b) {
    double acc = 0.0;
    for (std::size_t k = N; k-- > 0;) acc = acc * b + coeffs[k];
    return acc;
}

/// The eleven functions of b behind C1..C6:
///   C1 = s1^2 k1,  C2 = a s1^2 k2,
///   C3 = beta^2 s1^2 k3a + beta rho s1 s2 k3b + s2^2 k3c,
///   C4 = a (beta^2 s1^2 k4a + beta rho s1 s2 k4b + s2^2 k4c),
///   C5 = beta s1^2 k5a + rho s1 s2 e^{-b},
///   C6 = a (beta s1^2 k6a + rho s1 s2 k6b).
struct NoiseKernels {
    double k1, k2, k3a, k3b, k3c, k4a, k4b, k4c, k5a, k6a, k6b;
};

inline NoiseKernels noise_kernels(double b) {
    if (b < kSmallB) {
        return {horner(k1_series, b),  horner(k2_series, b),  horner(k3a_series, b),
                horner(k3b_series, b), horner(k3c_series, b), horner(k4a_series, b),
                horner(k4b_series, b), horner(k4c_series, b), horner(k5a_series, b),
                horner(k6a_series, b), horner(k6b_series, b)};
    }
    const double e = std::exp(-b);
    const double om = -std::expm1(-b);  // 1 - e^{-b}
    const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    return {
        e * om / b,
        om * om / (2.0 * b2),
        2.0 * e * (std::sinh(b) - b) / b3,
        2.0 * ((1.0 + b) * e - 1.0) / b2,
        om / b,
        (2.0 * b + 4.0 * b * e - 5.0 + 4.0 * e + e * e) / (2.0 * b4),
        (-2.0 * b - 2.0 * b * e + 4.0 - 4.0 * e) / b3,
        (b - om) / b2,
        (e - b * e - e * e) / b2,
        (2.0 * b * e - 1.0 + e * e) / (2.0 * b3),
        (om - b * e) / b2,
    };
}

}  // namespace heston_clse::detail
