#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "bnelicit/errors.hpp"

namespace bnelicit::llm {

/// Named prompt templates loaded from a directory of UTF-8 .txt files.
/// Placeholders use {name} syntax; render replaces only the given keys, so
/// literal braces in template text (JSON examples) survive untouched.
class PromptLibrary {
public:
    static PromptLibrary load(const std::string& dir) {
        namespace fs = std::filesystem;
        PromptLibrary lib;
        if (!fs::is_directory(dir))
            throw ConfigError("prompt template directory not found: " + dir);
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
            std::ifstream in(entry.path(), std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            lib.templates_[entry.path().stem().string()] = buf.str();
        }
        if (lib.templates_.empty())
            throw ConfigError("no .txt prompt templates in: " + dir);
        return lib;
    }

    bool has(const std::string& name) const { return templates_.count(name) > 0; }

    const std::string& raw(const std::string& name) const {
        auto it = templates_.find(name);
        if (it == templates_.end())
            throw ConfigError("missing prompt template: " + name);
        return it->second;
    }

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& fills) const {
        std::string text = raw(name);
        for (const auto& [key, value] : fills) {
            const std::string token = "{" + key + "}";
            size_t pos = 0;
            while ((pos = text.find(token, pos)) != std::string::npos) {
                text.replace(pos, token.size(), value);
                pos += value.size();
            }
        }
        return text;
    }

private:
    std::map<std::string, std::string> templates_;
};

} // namespace bnelicit::llm
