#pragma once

#include <complex>
#include <stdexcept>

namespace dh2 {

// zeta = re + i im with re >= 0, in 1/length.
struct ComplexFrequency {
    double re = 0.0;
    double im = 0.0;

    ComplexFrequency() = default;
    ComplexFrequency(double re_, double im_) : re(re_), im(im_) {
        if (!(re >= 0.0))
            throw std::invalid_argument("ComplexFrequency: real part must be non-negative");
        if (re == 0.0 && im == 0.0)
            throw std::invalid_argument("ComplexFrequency: zero frequency");
    }

    std::complex<double> value() const { return {re, im}; }
};

}  // namespace dh2
