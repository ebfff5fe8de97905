#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "nerleak/rng.hpp"
#include "nerleak/subword.hpp"
#include "nerleak/vocab.hpp"

namespace nerleak::secrets {

struct PasswordConstraints {
    std::size_t min_len = 6;
    bool require_upper = true;
    bool require_lower = true;
    bool require_digit = true;
    bool require_symbol = true;
    // default avoids the tokenizer's trailing-punctuation set so generated
    // passwords always stay a single token
    std::string symbol_alphabet = "@#$%^&*+-_=/";
};

/// Non-empty subset of {prefix, suffix, shape}; the seven combinations of
/// the feature-password study.
struct FeatureCombination {
    bool prefix = false;
    bool suffix = false;
    bool shape = false;

    bool any() const { return prefix || suffix || shape; }
};

/// All seven non-empty combinations, in the study's numbering order:
/// prefix, suffix, shape, prefix+suffix, prefix+shape, suffix+shape, all.
std::vector<FeatureCombination> all_feature_combinations();

std::string gen_password(const PasswordConstraints& c, Rng& rng);
std::string gen_password(const PasswordConstraints& c, std::uint64_t seed);

/// Passwords whose suffix and shape features are absent from v at
/// generation time (the prefix may collide by design). Throws if `count`
/// candidates cannot be found within a bounded attempt budget.
std::vector<std::string> gen_out_vocab_passwords(const vocab::Vocabulary& v, std::size_t count,
                                                 const PasswordConstraints& c, std::uint64_t seed);

/// Luhn mod-10 checksum test. Throws on empty or non-digit input.
bool luhn_valid(std::string_view digits);

/// 16 digits: 15 random plus the computed Luhn check digit.
std::string gen_credit_card(Rng& rng);
std::string gen_credit_card(std::uint64_t seed);

/// ddd-ddd-dddd with the North American Numbering Plan exclusions applied:
/// area code and exchange never start with 0 or 1 and never have middle
/// digits 11 (N11 codes); 555-01xx line ranges are excluded.
std::string gen_phone(Rng& rng);
std::string gen_phone(std::uint64_t seed);

std::string gen_ip(Rng& rng);
std::string gen_ip(std::uint64_t seed);

/// Simplified guess estimator: (size of the union of character classes
/// present)^length, halved once when the password is in the common list.
/// A proxy for a full strength estimator; only the bucket thresholds below
/// are load-bearing.
double estimate_guesses(std::string_view password,
                        const std::unordered_set<std::string>* common_passwords = nullptr);

/// Bucket by guesses: < 1e3, 1e6, 1e8, 1e10 give levels 0..3; >= 1e10 is 4.
int strength_level(double guesses);
int strength_level(std::string_view password,
                   const std::unordered_set<std::string>* common_passwords = nullptr);

/// Load a newline-delimited common-password list.
std::unordered_set<std::string> load_common_passwords(const std::string& path);

/// Passwords of the target's exact length sharing the combo's feature
/// strings with the target and differing in every non-combo feature among
/// {prefix, suffix, shape}. Outputs are distinct words, none equal to the
/// target. Throws when the combination is infeasible within the attempt
/// budget.
std::vector<std::string> gen_feature_passwords(std::string_view target, const FeatureCombination& combo,
                                               std::size_t count, std::uint64_t seed,
                                               const subword::SubwordConfig& cfg = {});

// Injective entity fillers for the synthetic corpus. Distinct indices give
// distinct strings, so generators drawing from disjoint index ranges
// produce disjoint inventories by construction.
std::string person_name(std::uint64_t index);
std::string location_name(std::uint64_t index);
std::string record_id(std::uint64_t index);
std::string contact_phone(std::uint64_t index);
std::string secret_token(std::uint64_t index);

/// Filler dispatch by label name (PERSON, LOCATION, ID, CONTACT, SECRET).
/// Throws on an unknown label.
std::string entity_value(std::string_view label, std::uint64_t index);

}  // namespace nerleak::secrets
