#pragma once

#include <stdexcept>
#include <string>

namespace ock {

// Base for every error the modem raises on purpose. The CLI maps the three
// subclasses onto its exit codes (config 2, receiver 3, I/O 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ReceiverError : public Error {
public:
    enum class Kind {
        no_packet,           // sync peak below the detection floor
        estimation_failure,  // training matrix ill-conditioned
        detection_failure    // channel matrix ill-conditioned
    };

    ReceiverError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ock
