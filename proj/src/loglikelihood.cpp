#include "profcat/loglikelihood.hpp"

#include <cmath>

namespace profcat {

namespace {

using i128 = __int128;

// observed * ln(observed / expected) where
// (observed - expected) = delta / total and expected = size * marginal / total.
double term(std::int64_t observed, std::int64_t size, std::int64_t marginal, i128 delta)
{
    if (observed == 0)
        return 0.0;
    auto o = static_cast<double>(observed);
    // (O - E) / E = delta / (size * marginal)
    double ratio = static_cast<double>(delta) / (static_cast<double>(size) * static_cast<double>(marginal));
    return o * std::log1p(ratio);
}

} // namespace

double loglikelihood(const Contingency& t) noexcept
{
    std::int64_t marginal = t.in_doc + t.in_rest;
    if (marginal == 0 || t.doc_size + t.rest_size == 0)
        return 0.0;
    i128 cross = static_cast<i128>(t.in_doc) * t.rest_size - static_cast<i128>(t.in_rest) * t.doc_size;
    double ll = term(t.in_doc, t.doc_size, marginal, cross) + term(t.in_rest, t.rest_size, marginal, -cross);
    return 2.0 * ll;
}

bool over_represented(const Contingency& t) noexcept
{
    return static_cast<i128>(t.in_doc) * t.rest_size > static_cast<i128>(t.in_rest) * t.doc_size;
}

} // namespace profcat
