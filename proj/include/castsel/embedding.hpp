#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace castsel {

/// Externally computed code embeddings keyed by exemplar id.
/// File format: a header line "dim d", then one line "id v1 ... vd" per vector.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }

    /// Throws InputError on dimension mismatch or a repeated id.
    void add(std::string id, std::vector<double> vec);

    /// Empty optional for an unknown id.
    std::optional<std::span<const double>> find(const std::string& id) const;
    const std::string& id(std::size_t row) const { return ids_.at(row); }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }

    /// Shortest round-trip decimal representation of every value.
    void write(std::ostream& out) const;

    static EmbeddingTable read(std::istream& in);
    static EmbeddingTable read(const std::filesystem::path& path);

private:
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Cosine similarity; nullopt when either vector has zero norm.
std::optional<double> cosine(std::span<const double> a, std::span<const double> b);

} // namespace castsel
