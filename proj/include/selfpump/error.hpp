#ifndef SELFPUMP_ERROR_HPP
#define SELFPUMP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selfpump
{
// Base for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// An argument or value type violates its invariant.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

// The loop cannot reach threshold with the configured amplifier.
class NoLasing : public Error
{
public:
    using Error::Error;
};

// An iterative solver or fitter ran out of iterations.
class NonConvergence : public Error
{
public:
    using Error::Error;
};

// Configuration rejected at load time. key() names the offending entry.
class ConfigError : public Error
{
public:
    ConfigError(std::string key, const std::string &message)
        : Error(key.empty() ? message : key + ": " + message), key_(std::move(key))
    {
    }
    const std::string &key() const { return key_; }

private:
    std::string key_;
};

class IoError : public Error
{
public:
    using Error::Error;
};

// Malformed tabular input. line() is 1-based.
class ParseError : public IoError
{
public:
    ParseError(std::size_t line, const std::string &message)
        : IoError("line " + std::to_string(line) + ": " + message), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace selfpump

#endif // SELFPUMP_ERROR_HPP
