#include "shortmem/error.hpp"

namespace shortmem {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::out_of_range: return "out_of_range";
    case Errc::capacity: return "capacity";
    case Errc::parse: return "parse";
    case Errc::validation: return "validation";
    case Errc::numerical: return "numerical";
    case Errc::io: return "io";
    case Errc::invariant: return "invariant";
    }
    return "unknown";
}

}  // namespace shortmem
