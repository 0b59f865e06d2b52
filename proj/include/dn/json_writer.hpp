#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace dn {

/// Minimal streaming JSON writer. Numbers print with 17 significant digits
/// so doubles round-trip and output is byte-stable across runs.
class JsonWriter {
public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() {
        comma();
        out_ += '{';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_object() {
        out_ += '}';
        fresh_ = false;
        return *this;
    }
    JsonWriter& begin_array() {
        comma();
        out_ += '[';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_array() {
        out_ += ']';
        fresh_ = false;
        return *this;
    }
    JsonWriter& key(const std::string& k) {
        comma();
        append_string(k);
        out_ += ':';
        fresh_ = true;
        return *this;
    }
    JsonWriter& value(double v) {
        comma();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ += buf;
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(long long v) {
        comma();
        out_ += std::to_string(v);
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(size_t v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(bool b) {
        comma();
        out_ += b ? "true" : "false";
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(const std::string& s) {
        comma();
        append_string(s);
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string(s)); }

private:
    void comma() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
            out_.back() != ':')
            out_ += ',';
        fresh_ = false;
    }
    void append_string(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    bool fresh_ = true;
};

} // namespace dn
