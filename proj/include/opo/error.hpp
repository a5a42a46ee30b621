#pragma once

#include <stdexcept>
#include <string>

namespace opo {

enum class ErrorKind {
  Domain,  // argument outside a declared validity range
  Model,   // physically inconsistent model parameters (e.g. gain, infeasible finesse)
  Config,  // bad or incomplete configuration
  Fit,     // fit failed to converge or data unusable
  Io,      // file parse / read / write
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }
[[noreturn]] inline void throw_model(const std::string& msg) { throw Error(ErrorKind::Model, msg); }
[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void throw_fit(const std::string& msg) { throw Error(ErrorKind::Fit, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }

} // namespace opo
