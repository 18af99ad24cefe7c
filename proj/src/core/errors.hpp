#pragma once
#include <stdexcept>
#include <string>

namespace stochham {

// Error taxonomy shared by the whole library. The C boundary maps these to
// integer codes; the CLI maps the codes to process exit statuses.
enum class ErrorCode {
    ok = 0,
    invalid_argument = 1, // null handles, malformed calls
    spec = 2,             // configuration / specification validation failures
    domain = 3,           // state left the admissible domain (or exit budget blown)
    numeric = 4,          // quadrature / integration / root-finding failures
    io = 5,               // file system problems
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

struct SpecError : Error {
    explicit SpecError(const std::string& m) : Error(ErrorCode::spec, m) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorCode::domain, m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(ErrorCode::numeric, m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCode::io, m) {}
};

} // namespace stochham
