#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifsmeasure {

/// A finite word i_1 ... i_m over the alphabet {0, ..., N-1}. Symbol j
/// stands for the map at index j; text output is 1-based.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<std::uint8_t> symbols) : symbols_(std::move(symbols)) {
        if (symbols_.empty()) throw std::invalid_argument("a word needs at least one symbol");
    }
    Word(std::initializer_list<int> symbols) {
        for (int s : symbols) {
            if (s < 0 || s > 255) throw std::invalid_argument("word symbol out of range");
            symbols_.push_back(static_cast<std::uint8_t>(s));
        }
        if (symbols_.empty()) throw std::invalid_argument("a word needs at least one symbol");
    }

    /// Parses 1-based symbols, e.g. "12" or "1,2,2".
    static Word parse(const std::string& text, std::size_t alphabet) {
        std::vector<std::uint8_t> out;
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            const int v = std::stoi(token);
            if (v < 1 || static_cast<std::size_t>(v) > alphabet)
                throw std::invalid_argument("word symbol " + token + " outside 1.." + std::to_string(alphabet));
            out.push_back(static_cast<std::uint8_t>(v - 1));
            token.clear();
        };
        const bool separated = text.find(',') != std::string::npos;
        for (char c : text) {
            if (c == ',' || c == ' ') {
                flush();
            } else if (c >= '0' && c <= '9') {
                token.push_back(c);
                if (!separated) flush();
            } else {
                throw std::invalid_argument("bad word '" + text + "'");
            }
        }
        flush();
        return Word(std::move(out));
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    std::uint8_t operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<std::uint8_t>& symbols() const noexcept { return symbols_; }

    bool fits(std::size_t alphabet) const {
        for (auto s : symbols_)
            if (s >= alphabet) return false;
        return true;
    }

    /// 1-based text; comma separated once the alphabet exceeds nine symbols.
    std::string str() const {
        std::string out;
        bool wide = false;
        for (auto s : symbols_) wide = wide || s >= 9;
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (wide && i) out.push_back(',');
            out += std::to_string(symbols_[i] + 1);
        }
        return out;
    }

    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::vector<std::uint8_t> symbols_;
};

/// Cyclic shift: i_{k+1} ... i_m i_1 ... i_k. k is reduced mod length.
inline Word rotate(const Word& w, std::size_t k) {
    const std::size_t m = w.size();
    k %= m;
    std::vector<std::uint8_t> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = w[(j + k) % m];
    return Word(std::move(out));
}

/// Smallest p such that w is a power of its length-p prefix.
inline std::size_t smallest_period(const Word& w) {
    const std::size_t m = w.size();
    for (std::size_t p = 1; p < m; ++p) {
        if (m % p) continue;
        bool ok = true;
        for (std::size_t j = p; j < m && ok; ++j) ok = w[j] == w[j - p];
        if (ok) return p;
    }
    return m;
}

/// A rotation class of words, represented by its least rotation.
struct CyclicClass {
    Word representative;
    /// Number of distinct rotations, i.e. the smallest period.
    std::size_t class_size;
};

/// All rotation classes of words of length m over N symbols, in lexicographic
/// order of representatives (Fredricksen-Kessler-Maiorana enumeration).
inline std::vector<CyclicClass> cyclic_classes(std::size_t alphabet, std::size_t m) {
    if (alphabet < 2) throw std::invalid_argument("cyclic_classes: alphabet needs at least two symbols");
    if (m < 1) throw std::invalid_argument("cyclic_classes: length must be positive");
    if (alphabet > 255) throw std::invalid_argument("cyclic_classes: alphabet too large");
    std::vector<CyclicClass> out;
    std::vector<std::uint8_t> a(m + 1, 0);
    const auto top = static_cast<std::uint8_t>(alphabet - 1);
    std::size_t i = 1;
    // a[1..m] walks through pre-necklaces; a[1..m] is a necklace exactly when
    // the current period divides m.
    out.push_back({Word(std::vector<std::uint8_t>(m, 0)), 1});
    while (true) {
        i = m;
        while (i > 0 && a[i] == top) --i;
        if (i == 0) break;
        ++a[i];
        for (std::size_t j = i + 1; j <= m; ++j) a[j] = a[j - i];
        if (m % i == 0) out.push_back({Word(std::vector<std::uint8_t>(a.begin() + 1, a.end())), i});
    }
    return out;
}

/// Every word of length m, lexicographically ordered.
inline std::vector<Word> all_words(std::size_t alphabet, std::size_t m) {
    std::vector<Word> out;
    std::vector<std::uint8_t> cur(m, 0);
    while (true) {
        out.emplace_back(cur);
        std::size_t j = m;
        while (j > 0 && cur[j - 1] == alphabet - 1) cur[--j] = 0;
        if (j == 0) break;
        ++cur[j - 1];
    }
    return out;
}

}  // namespace ifsmeasure
