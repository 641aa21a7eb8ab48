#include "castsel/embedding.hpp"

#include "castsel/errors.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <fstream>
#include <sstream>

namespace castsel {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InputError("embedding dimension must be positive");
}

void EmbeddingTable::add(std::string id, std::vector<double> vec) {
    if (vec.size() != dim_) {
        throw InputError("embedding '" + id + "' has dimension " + std::to_string(vec.size()) + ", expected " +
                         std::to_string(dim_));
    }
    if (!by_id_.emplace(id, ids_.size()).second) throw InputError("duplicate embedding id '" + id + "'");
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), vec.begin(), vec.end());
}

std::optional<std::span<const double>> EmbeddingTable::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return row(it->second);
}

EmbeddingTable EmbeddingTable::read(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<EmbeddingTable> table;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!table) {
            std::size_t d = 0;
            if (first != "dim" || !(ls >> d)) {
                throw InputError("embedding file line " + std::to_string(lineno) + ": expected 'dim <d>' header");
            }
            table.emplace(d);
            continue;
        }
        std::vector<double> v;
        v.reserve(table->dim());
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                double x = std::stod(tok, &used);
                if (used != tok.size() || !std::isfinite(x)) throw std::invalid_argument(tok);
                v.push_back(x);
            } catch (const std::exception&) {
                throw InputError("embedding file line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
        }
        try {
            table->add(first, std::move(v));
        } catch (const InputError& e) {
            throw InputError("embedding file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!table) throw InputError("embedding file is empty");
    return std::move(*table);
}

void EmbeddingTable::write(std::ostream& out) const {
    out << "dim " << dim_ << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        out << ids_[r];
        for (double x : row(r)) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

EmbeddingTable EmbeddingTable::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open embedding file " + path.string());
    return read(in);
}

std::optional<double> cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return std::nullopt;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace castsel
