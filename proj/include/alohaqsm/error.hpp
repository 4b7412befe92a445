#ifndef ALOHAQSM_ERROR_HPP
#define ALOHAQSM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace alohaqsm
{

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A precondition was violated (shape mismatch, wrong domain, bad parameter).
class ContractError : public Error
{
public:
    using Error::Error;
};

/// The numerics produced something unusable (non-finite iterate, undefined
/// regression slope, ...).
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error
{
public:
    using Error::Error;
};

namespace detail
{
inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw ContractError(what);
}
} // namespace detail

} // namespace alohaqsm

#endif // ALOHAQSM_ERROR_HPP
