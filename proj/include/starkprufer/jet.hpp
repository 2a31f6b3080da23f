#pragma once

// Truncated Taylor series ("derivative towers") in one variable.
//
// Jet<N> stores c[k] = f^(k)(x0) / k! for k = 0..N. Arithmetic follows the
// usual recurrences for products, quotients and elementary functions, so a
// callable written generically over its scalar type yields exact derivatives
// up to order N when evaluated on Jet<N>::variable(x0).

#include <array>
#include <cmath>
#include <cstddef>

namespace starkprufer {

template <int N>
struct Jet {
    static_assert(N >= 0, "jet order must be non-negative");
    std::array<double, N + 1> c{};

    Jet() = default;
    Jet(double v) { c[0] = v; }  // NOLINT: implicit constants are intended

    static Jet variable(double x0) {
        Jet j(x0);
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    // k-th derivative at the expansion point.
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    Jet& operator/=(double s) {
        for (auto& v : c) v /= s;
        return *this;
    }
    Jet operator-() const {
        Jet r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N>
Jet<N> operator+(Jet<N> a, double s) { a.c[0] += s; return a; }
template <int N>
Jet<N> operator+(double s, Jet<N> a) { a.c[0] += s; return a; }
template <int N>
Jet<N> operator-(Jet<N> a, double s) { a.c[0] -= s; return a; }
template <int N>
Jet<N> operator-(double s, const Jet<N>& a) { return (-a) + s; }
template <int N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <int N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }
template <int N>
Jet<N> operator/(Jet<N> a, double s) { return a /= s; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> q;
    for (int k = 0; k <= N; ++k) {
        double s = a.c[k];
        for (int j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
        q.c[k] = s / b.c[0];
    }
    return q;
}

template <int N>
Jet<N> operator/(double s, const Jet<N>& b) { return Jet<N>(s) / b; }

template <int N>
Jet<N> exp(const Jet<N>& a) {
    Jet<N> e;
    e.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
        e.c[k] = s / k;
    }
    return e;
}

template <int N>
Jet<N> log(const Jet<N>& a) {
    Jet<N> l;
    l.c[0] = std::log(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j < k; ++j) s += j * l.c[j] * a.c[k - j];
        l.c[k] = (a.c[k] - s / k) / a.c[0];
    }
    return l;
}

// a^r for a real exponent r; requires a(x0) > 0 unless r is a small integer.
template <int N>
Jet<N> pow(const Jet<N>& a, double r) {
    Jet<N> p;
    p.c[0] = std::pow(a.c[0], r);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += (r * j - (k - j)) * a.c[j] * p.c[k - j];
        p.c[k] = s / (k * a.c[0]);
    }
    return p;
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) { return pow(a, 0.5); }

template <int N>
void sincos(const Jet<N>& a, Jet<N>& s, Jet<N>& co) {
    s = Jet<N>();
    co = Jet<N>();
    s.c[0] = std::sin(a.c[0]);
    co.c[0] = std::cos(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += j * a.c[j] * co.c[k - j];
            cc -= j * a.c[j] * s.c[k - j];
        }
        s.c[k] = ss / k;
        co.c[k] = cc / k;
    }
}

template <int N>
Jet<N> sin(const Jet<N>& a) { Jet<N> s, c; sincos(a, s, c); return s; }
template <int N>
Jet<N> cos(const Jet<N>& a) { Jet<N> s, c; sincos(a, s, c); return c; }

template <int N>
Jet<N> atan(const Jet<N>& a) {
    // atan' = a' / (1 + a^2), then integrate term by term.
    Jet<N> d;
    for (int k = 0; k < N; ++k) d.c[k] = (k + 1) * a.c[k + 1];
    Jet<N> q = d / (1.0 + a * a);
    Jet<N> r;
    r.c[0] = std::atan(a.c[0]);
    for (int k = 1; k <= N; ++k) r.c[k] = q.c[k - 1] / k;
    return r;
}

// Derivative of the represented function; the top coefficient is lost.
template <int N>
Jet<N> derivative(const Jet<N>& a) {
    Jet<N> d;
    for (int k = 0; k < N; ++k) d.c[k] = (k + 1) * a.c[k + 1];
    return d;
}

// Drops or zero-extends the tower to a different order.
template <int M, int N>
Jet<M> resize(const Jet<N>& a) {
    Jet<M> r;
    for (int k = 0; k <= M && k <= N; ++k) r.c[k] = a.c[k];
    return r;
}

// Given the Taylor coefficients `outer` of f about inner(x0), returns the
// jet of f(inner(t)) about t0.
template <int N>
Jet<N> compose(const Jet<N>& outer, const Jet<N>& inner) {
    Jet<N> delta = inner;
    delta.c[0] = 0.0;
    Jet<N> r(outer.c[N]);
    for (int k = N - 1; k >= 0; --k) r = r * delta + outer.c[k];
    return r;
}

}  // namespace starkprufer
