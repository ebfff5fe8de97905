#include "nerleak/secrets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nerleak/utf8.hpp"

namespace nerleak::secrets {

namespace {

const std::string kLower = "abcdefghijklmnopqrstuvwxyz";
const std::string kUpper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
const std::string kDigits = "0123456789";
const std::string kAlnum = kLower + kUpper + kDigits;

char pick_char(const std::string& alphabet, Rng& rng) {
    return alphabet[static_cast<std::size_t>(rng.below(alphabet.size()))];
}

}  // namespace

std::vector<FeatureCombination> all_feature_combinations() {
    return {
        {true, false, false}, {false, true, false}, {false, false, true}, {true, true, false},
        {true, false, true},  {false, true, true},  {true, true, true},
    };
}

std::string gen_password(const PasswordConstraints& c, Rng& rng) {
    std::size_t required = 0;
    std::string pool;
    if (c.require_lower) {
        ++required;
        pool += kLower;
    }
    if (c.require_upper) {
        ++required;
        pool += kUpper;
    }
    if (c.require_digit) {
        ++required;
        pool += kDigits;
    }
    if (c.require_symbol) {
        ++required;
        if (c.symbol_alphabet.empty())
            throw std::invalid_argument("gen_password: require_symbol with empty symbol_alphabet");
        pool += c.symbol_alphabet;
    }
    if (pool.empty()) pool = kLower;
    if (c.min_len < required)
        throw std::invalid_argument("gen_password: min_len smaller than the number of required classes");

    const std::size_t len = c.min_len + static_cast<std::size_t>(rng.below(4));
    std::vector<char> chars;
    chars.reserve(len);
    if (c.require_lower) chars.push_back(pick_char(kLower, rng));
    if (c.require_upper) chars.push_back(pick_char(kUpper, rng));
    if (c.require_digit) chars.push_back(pick_char(kDigits, rng));
    if (c.require_symbol) chars.push_back(pick_char(c.symbol_alphabet, rng));
    while (chars.size() < len) chars.push_back(pick_char(pool, rng));
    rng.shuffle(chars);
    return std::string(chars.begin(), chars.end());
}

std::string gen_password(const PasswordConstraints& c, std::uint64_t seed) {
    Rng rng(seed);
    return gen_password(c, rng);
}

std::vector<std::string> gen_out_vocab_passwords(const vocab::Vocabulary& v, std::size_t count,
                                                 const PasswordConstraints& c, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    const std::size_t budget = std::max<std::size_t>(1000, count * 200);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > budget)
            throw std::runtime_error("gen_out_vocab_passwords: attempt budget exhausted after " +
                                     std::to_string(attempts - 1) + " tries");
        std::string pw = gen_password(c, rng);
        const auto f = subword::features(pw);
        if (v.contains(f.suffix) || v.contains(f.shape)) continue;
        if (!seen.insert(pw).second) continue;
        out.push_back(std::move(pw));
    }
    return out;
}

bool luhn_valid(std::string_view digits) {
    if (digits.empty()) throw std::invalid_argument("luhn_valid: empty input");
    unsigned sum = 0;
    bool double_it = false;
    for (std::size_t i = digits.size(); i > 0; --i) {
        const char ch = digits[i - 1];
        if (ch < '0' || ch > '9')
            throw std::invalid_argument("luhn_valid: non-digit character in input");
        unsigned d = static_cast<unsigned>(ch - '0');
        if (double_it) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        double_it = !double_it;
    }
    return sum % 10 == 0;
}

std::string gen_credit_card(Rng& rng) {
    std::string digits;
    digits.reserve(16);
    for (int i = 0; i < 15; ++i) digits.push_back(static_cast<char>('0' + rng.below(10)));
    // check digit: make the full 16-digit string pass the mod-10 test
    unsigned sum = 0;
    bool double_it = true;  // position 15 counted from the right of the 16-digit result
    for (std::size_t i = digits.size(); i > 0; --i) {
        unsigned d = static_cast<unsigned>(digits[i - 1] - '0');
        if (double_it) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        double_it = !double_it;
    }
    digits.push_back(static_cast<char>('0' + (10 - sum % 10) % 10));
    return digits;
}

std::string gen_credit_card(std::uint64_t seed) {
    Rng rng(seed);
    return gen_credit_card(rng);
}

namespace {

bool valid_npa_code(unsigned code) {
    const unsigned d1 = code / 100, d2 = (code / 10) % 10, d3 = code % 10;
    if (d1 < 2) return false;          // leading 0 or 1
    if (d2 == 1 && d3 == 1) return false;  // N11 service codes
    return true;
}

}  // namespace

std::string gen_phone(Rng& rng) {
    unsigned area, exchange, line;
    do {
        area = static_cast<unsigned>(rng.below(1000));
    } while (!valid_npa_code(area));
    do {
        exchange = static_cast<unsigned>(rng.below(1000));
        line = static_cast<unsigned>(rng.below(10000));
    } while (!valid_npa_code(exchange) || (exchange == 555 && line / 100 == 1));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03u-%03u-%04u", area, exchange, line);
    return buf;
}

std::string gen_phone(std::uint64_t seed) {
    Rng rng(seed);
    return gen_phone(rng);
}

std::string gen_ip(Rng& rng) {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i) out += '.';
        out += std::to_string(rng.below(256));
    }
    return out;
}

std::string gen_ip(std::uint64_t seed) {
    Rng rng(seed);
    return gen_ip(rng);
}

double estimate_guesses(std::string_view password,
                        const std::unordered_set<std::string>* common_passwords) {
    if (password.empty()) throw std::invalid_argument("estimate_guesses: empty password");
    bool lower = false, upper = false, digit = false, symbol = false;
    const auto cps = utf8::decode(password);
    for (char32_t c : cps) {
        if (c >= U'a' && c <= U'z')
            lower = true;
        else if (c >= U'A' && c <= U'Z')
            upper = true;
        else if (c >= U'0' && c <= U'9')
            digit = true;
        else
            symbol = true;
    }
    double charset = 0.0;
    if (lower) charset += 26;
    if (upper) charset += 26;
    if (digit) charset += 10;
    if (symbol) charset += 33;
    double guesses = std::pow(charset, static_cast<double>(cps.size()));
    if (common_passwords && common_passwords->count(std::string(password))) guesses *= 0.5;
    return guesses;
}

int strength_level(double guesses) {
    if (guesses < 1e3) return 0;
    if (guesses < 1e6) return 1;
    if (guesses < 1e8) return 2;
    if (guesses < 1e10) return 3;
    return 4;
}

int strength_level(std::string_view password,
                   const std::unordered_set<std::string>* common_passwords) {
    return strength_level(estimate_guesses(password, common_passwords));
}

std::unordered_set<std::string> load_common_passwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_common_passwords: cannot open " + path);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.insert(line);
    }
    return out;
}

std::vector<std::string> gen_feature_passwords(std::string_view target, const FeatureCombination& combo,
                                               std::size_t count, std::uint64_t seed,
                                               const subword::SubwordConfig& cfg) {
    if (!combo.any()) throw std::invalid_argument("gen_feature_passwords: empty feature combination");
    const auto tcps = utf8::decode(target);
    const std::size_t len = tcps.size();
    if (len == 0) throw std::invalid_argument("gen_feature_passwords: empty target");
    const auto tf = subword::features(target, cfg);

    Rng rng(seed);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    const std::size_t budget = std::max<std::size_t>(2000, count * 400);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > budget)
            throw std::runtime_error(
                "gen_feature_passwords: combination infeasible for this target (budget " +
                std::to_string(budget) + " exhausted with " + std::to_string(out.size()) + " of " +
                std::to_string(count) + " found)");
        std::vector<char32_t> cand(len);
        for (std::size_t i = 0; i < len; ++i) {
            if (combo.shape) {
                // draw a character realizing the target's per-position class,
                // which reproduces the target's shape exactly
                const char32_t t = tcps[i];
                if (t >= U'a' && t <= U'z')
                    cand[i] = static_cast<char32_t>(kLower[rng.below(26)]);
                else if (t >= U'A' && t <= U'Z')
                    cand[i] = static_cast<char32_t>(kUpper[rng.below(26)]);
                else if (t >= U'0' && t <= U'9')
                    cand[i] = static_cast<char32_t>(kDigits[rng.below(10)]);
                else
                    cand[i] = t;  // specials appear verbatim in the shape
            } else {
                cand[i] = static_cast<char32_t>(kAlnum[rng.below(kAlnum.size())]);
            }
        }
        if (combo.prefix)
            for (std::size_t i = 0; i < std::min(cfg.prefix_len, len); ++i) cand[i] = tcps[i];
        if (combo.suffix)
            for (std::size_t i = 0; i < std::min(cfg.suffix_len, len); ++i)
                cand[len - 1 - i] = tcps[len - 1 - i];

        std::string word = utf8::encode(cand);
        if (word == target) continue;
        const auto f = subword::features(word, cfg);
        if (combo.prefix ? f.prefix != tf.prefix : f.prefix == tf.prefix) continue;
        if (combo.suffix ? f.suffix != tf.suffix : f.suffix == tf.suffix) continue;
        if (combo.shape ? f.shape != tf.shape : f.shape == tf.shape) continue;
        if (!seen.insert(word).second) continue;
        out.push_back(std::move(word));
    }
    return out;
}

std::string person_name(std::uint64_t index) {
    static const char* const kSyllables[] = {
        "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du", "ka", "ke", "ki",
        "ko", "ku", "la", "le", "li", "lo", "lu", "ma", "me", "mi", "mo", "mu", "na",
        "ne", "ni", "no", "nu", "ra", "re", "ri", "ro", "ru", "sa", "se", "si", "so",
        "su", "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "vo", "vu"};
    constexpr std::uint64_t kBase = 50;
    // offsetting by kBase^2 pins the digit count, making the encoding injective
    std::uint64_t n = index + kBase * kBase;
    std::string name;
    while (n > 0) {
        name.insert(0, kSyllables[n % kBase]);
        n /= kBase;
    }
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    return name;
}

std::string location_name(std::uint64_t index) {
    return person_name(index) + "ville";
}

std::string record_id(std::uint64_t index) {
    static const char* kB36 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    std::string digits;
    std::uint64_t n = index;
    do {
        digits.insert(digits.begin(), kB36[n % 36]);
        n /= 36;
    } while (n > 0);
    while (digits.size() < 6) digits.insert(digits.begin(), '0');
    return "MRN" + digits;
}

std::string contact_phone(std::uint64_t index) {
    // enumerate codes valid under the same NANP filter as gen_phone
    static const std::vector<unsigned> kAreas = [] {
        std::vector<unsigned> v;
        for (unsigned c = 0; c < 1000; ++c)
            if (valid_npa_code(c)) v.push_back(c);
        return v;
    }();
    static const std::vector<unsigned> kExchanges = [] {
        std::vector<unsigned> v;
        for (unsigned c = 0; c < 1000; ++c)
            if (valid_npa_code(c) && c != 555) v.push_back(c);
        return v;
    }();
    const unsigned line = static_cast<unsigned>(index % 10000);
    const std::uint64_t rest = index / 10000;
    const unsigned exchange = kExchanges[rest % kExchanges.size()];
    const unsigned area = kAreas[(rest / kExchanges.size()) % kAreas.size()];
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03u-%03u-%04u", area, exchange, line);
    return buf;
}

std::string secret_token(std::uint64_t index) {
    static const char* kB36 = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string digits;
    std::uint64_t n = index;
    do {
        digits.insert(digits.begin(), kB36[n % 36]);
        n /= 36;
    } while (n > 0);
    return "pw" + digits + "#A9";
}

std::string entity_value(std::string_view label, std::uint64_t index) {
    if (label == "PERSON") return person_name(index);
    if (label == "LOCATION") return location_name(index);
    if (label == "ID") return record_id(index);
    if (label == "CONTACT") return contact_phone(index);
    if (label == "SECRET") return secret_token(index);
    throw std::invalid_argument("entity_value: no generator for label '" + std::string(label) + "'");
}

}  // namespace nerleak::secrets
