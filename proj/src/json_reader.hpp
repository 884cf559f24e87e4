#pragma once

// Field access over nlohmann::json with located error messages.

#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "ibrsc/phasor.hpp"

namespace ibrsc::detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Line of every object key and array element, by path ("buses[2].id").
class LineIndex {
  public:
    explicit LineIndex(const std::string& text);
    int line(const std::string& path) const;

  private:
    std::map<std::string, int> lines_;
};

class Node {
  public:
    Node(const json& j, std::string path, const LineIndex& lines, const std::string& origin)
        : j_(&j), path_(std::move(path)), lines_(&lines), origin_(&origin) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }
    [[noreturn]] void fail(const std::string& msg) const;

    bool has(const char* key) const;
    Node at(const char* key) const;  // required
    std::optional<Node> find(const char* key) const;
    Node operator[](std::size_t i) const;
    std::size_t size() const;

    /// Throws on any key outside `known`.
    void only(std::initializer_list<const char*> known) const;

    void expect_object() const;
    void expect_array() const;
    double number() const;
    int integer() const;
    bool boolean() const;
    std::string string() const;
    Phasor complex() const;

    double number_or(const char* key, double def) const;
    int integer_or(const char* key, int def) const;
    bool boolean_or(const char* key, bool def) const;
    std::string string_or(const char* key, const std::string& def) const;
    std::optional<Phasor> complex_opt(const char* key) const;

  private:
    const json* j_;
    std::string path_;
    const LineIndex* lines_;
    const std::string* origin_;
};

std::string read_file(const std::filesystem::path& path);

/// Parses text, reporting syntax errors with their line.
json parse_json(const std::string& text, const std::string& origin);

inline ojson complex_json(Phasor z) { return ojson::array({z.real(), z.imag()}); }

}  // namespace ibrsc::detail
