#pragma once

// Generated collections for the end-to-end tests. Every category owns a set
// of distinctive pseudo-words; the rest of each document is drawn from a
// Zipf-distributed background vocabulary shared by all categories.

#include "profcat/corpus.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace profcat::testing {

// Letters-only spelling of n so generated words survive tokenization.
inline std::string letters(std::size_t n)
{
    std::string s;
    do {
        s.push_back(static_cast<char>('a' + n % 26));
        n /= 26;
    } while (n > 0);
    return s;
}

inline std::string background_word(std::size_t i) { return "w" + letters(i); }
inline std::string category_term(std::size_t cat, std::size_t j) { return "k" + letters(cat) + "q" + letters(j); }
inline std::string category_code(std::size_t cat) { return std::to_string(100 + cat); }

struct SyntheticSpec {
    std::size_t categories = 50;
    std::size_t docs = 2000;
    std::size_t min_labels = 2;
    std::size_t max_labels = 4;
    std::size_t terms_per_category = 20;
    std::size_t background_vocab = 3000;
    std::size_t min_tokens = 120;
    std::size_t max_tokens = 200;
    double distinctive_share = 0.3; // fraction of tokens drawn from the labels' terms
    std::uint64_t seed = 7;
};

inline Collection make_synthetic(const SyntheticSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    std::vector<double> zipf(spec.background_vocab);
    for (std::size_t r = 0; r < zipf.size(); ++r)
        zipf[r] = 1.0 / static_cast<double>(r + 1);
    std::discrete_distribution<std::size_t> background(zipf.begin(), zipf.end());
    std::uniform_int_distribution<std::size_t> label_count(spec.min_labels, spec.max_labels);
    std::uniform_int_distribution<std::size_t> length(spec.min_tokens, spec.max_tokens);
    std::uniform_int_distribution<std::size_t> term(0, spec.terms_per_category - 1);
    std::bernoulli_distribution distinctive(spec.distinctive_share);

    std::vector<std::size_t> all(spec.categories);
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;

    Collection c;
    c.docs.reserve(spec.docs);
    for (std::size_t d = 0; d < spec.docs; ++d) {
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<std::size_t> labels(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(label_count(rng)));
        std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);

        LabeledDoc doc;
        doc.doc_id = "syn" + std::to_string(d);
        for (auto l : labels)
            doc.gold.insert(category_code(l));
        std::size_t n = length(rng);
        for (std::size_t t = 0; t < n; ++t) {
            if (t > 0)
                doc.body.push_back(t % 16 == 0 ? '\n' : ' ');
            doc.body += distinctive(rng) ? category_term(labels[pick(rng)], term(rng)) : background_word(background(rng));
        }
        c.docs.push_back(std::move(doc));
    }
    return c;
}

} // namespace profcat::testing
