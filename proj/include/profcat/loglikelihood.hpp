#pragma once

#include <cstdint>

namespace profcat {

// Log-likelihood keyness of a feature in one document against the rest of
// the reference corpus:
//
//   in_doc     = occurrences in the document          (O1)
//   in_rest    = occurrences in the rest of the corpus (O2)
//   doc_size   = tokens in the document               (N1)
//   rest_size  = tokens in the rest of the corpus     (N2)
//
//   E1 = N1 (O1 + O2) / (N1 + N2),  E2 = N2 (O1 + O2) / (N1 + N2)
//   LL = 2 (O1 ln(O1/E1) + O2 ln(O2/E2)),  with 0 ln(0/E) = 0.
//
// The observed/expected ratios are evaluated through log1p of an exactly
// computed integer numerator, so LL is exactly 0 at independence.
struct Contingency {
    std::int64_t in_doc = 0;
    std::int64_t in_rest = 0;
    std::int64_t doc_size = 0;
    std::int64_t rest_size = 0;
};

double loglikelihood(const Contingency& t) noexcept;

// True when the feature's relative frequency in the document exceeds its
// relative frequency in the whole corpus, i.e. O1 N2 > O2 N1.
bool over_represented(const Contingency& t) noexcept;

} // namespace profcat
