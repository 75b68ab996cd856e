#pragma once

#include <stdexcept>
#include <string>

namespace htc {

enum class errc {
    domain_error,
    bad_params,
    non_permutation,
    length_mismatch,
    dimension_mismatch,
    bad_contrast,
    infeasible,
    no_root,
    frame_error,
    ensemble_died,
    step_limit,
    parse_error,
    unsupported_format,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace htc
