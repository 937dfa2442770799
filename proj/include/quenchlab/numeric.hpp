#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace quenchlab {

// Neumaier compensated accumulator.
template <typename T>
class CompensatedSum {
public:
    void add(T x)
    {
        const T t = sum_ + x;
        if constexpr (std::is_floating_point_v<T>) {
            correction_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        } else {
            correction_ += fix(sum_, x, t);
        }
        sum_ = t;
    }
    [[nodiscard]] T value() const { return sum_ + correction_; }

private:
    static T fix(const T& s, const T& x, const T& t)
    {
        // complex: compensate real and imaginary parts independently
        using R = typename T::value_type;
        auto part = [](R a, R b, R c) {
            return std::abs(a) >= std::abs(b) ? (a - c) + b : (b - c) + a;
        };
        return T(part(s.real(), x.real(), t.real()), part(s.imag(), x.imag(), t.imag()));
    }

    T sum_{};
    T correction_{};
};

}  // namespace quenchlab
