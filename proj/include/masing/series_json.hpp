#ifndef MASING_SERIES_JSON_HPP
#define MASING_SERIES_JSON_HPP

#include <string>

#include <nlohmann/json.hpp>

#include <masing/scalar.hpp>
#include <masing/series.hpp>

// Wire format, nonzero entries only:
//   {"order": N, "backend": "rational"|"float", "coeffs": [[i, j, "num/den"|float], ...]}
// Series1 uses [[k, value], ...].

namespace masing
{

using json = nlohmann::json;

template <Scalar T>
json scalar_to_json(const T &x)
{
    if constexpr (is_exact_v<T>) {
        return format_rational(x);
    } else {
        return x;
    }
}

template <Scalar T>
T scalar_from_json(const json &j)
{
    if (j.is_string()) {
        return scalar_cast<T>(parse_rational(j.get<std::string>()));
    }
    if (j.is_number_integer()) {
        return scalar_cast<T>(Rational(j.get<long long>()));
    }
    if (j.is_number()) {
        return scalar_cast<T>(j.get<double>());
    }
    throw std::invalid_argument("expected a number or a \"num/den\" string, got " + j.dump());
}

namespace detail
{

template <Scalar T>
void check_backend(const json &j)
{
    if (j.contains("backend")) {
        const auto b = parse_backend(j.at("backend").get<std::string>());
        if (b != scalar_traits<T>::backend) {
            throw backend_mismatch(std::string("series payload has backend '") + backend_name(b)
                                   + "' but '" + scalar_traits<T>::name + "' was requested");
        }
    }
}

} // namespace detail

template <Scalar T>
json to_json(const Series2<T> &a)
{
    json coeffs = json::array();
    a.for_each_nonzero([&](int i, int j, const T &c) { coeffs.push_back(json::array({i, j, scalar_to_json(c)})); });
    return json{{"order", a.order()}, {"backend", scalar_traits<T>::name}, {"coeffs", coeffs}};
}

template <Scalar T>
json to_json(const Series1<T> &a)
{
    json coeffs = json::array();
    for (int k = 0; k <= a.order(); ++k) {
        if (a.coeff(k) != T(0)) {
            coeffs.push_back(json::array({k, scalar_to_json(a.coeff(k))}));
        }
    }
    return json{{"order", a.order()}, {"backend", scalar_traits<T>::name}, {"coeffs", coeffs}};
}

/// Strict parse: an explicit backend must match T.
template <Scalar T>
Series2<T> series2_from_json(const json &j)
{
    detail::check_backend<T>(j);
    Series2<T> a(j.at("order").get<int>());
    for (const auto &e : j.at("coeffs")) {
        if (!e.is_array() || e.size() != 3) {
            throw std::invalid_argument("Series2 coefficient entries must be [i, j, value]");
        }
        a.at(e[0].get<int>(), e[1].get<int>()) = scalar_from_json<T>(e[2]);
    }
    return a;
}

template <Scalar T>
Series1<T> series1_from_json(const json &j)
{
    detail::check_backend<T>(j);
    Series1<T> a(j.at("order").get<int>());
    for (const auto &e : j.at("coeffs")) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("Series1 coefficient entries must be [k, value]");
        }
        a.at(e[0].get<int>()) = scalar_from_json<T>(e[1]);
    }
    return a;
}

/// Lenient parse used by configs: ignores the payload backend and converts values.
template <Scalar T>
Series1<T> series1_from_json_any(const json &j)
{
    json copy = j;
    copy.erase("backend");
    return series1_from_json<T>(copy);
}

template <Scalar T>
Series2<T> series2_from_json_any(const json &j)
{
    json copy = j;
    copy.erase("backend");
    return series2_from_json<T>(copy);
}

} // namespace masing

#endif
