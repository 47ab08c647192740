#pragma once

#include <stdexcept>
#include <string>

namespace shortmem {

enum class Errc {
    invalid_argument = 1,
    out_of_range,
    capacity,
    parse,
    validation,
    numerical,
    io,
    invariant,
};

const char* errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so the C
// layer can map it onto a status value without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace shortmem
