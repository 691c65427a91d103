#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netcomp
{

/*! \brief Base class of all errors raised by the library. */
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class assignment_to_non_net : public error
{
public:
  using error::error;
};

class param_out_of_range : public error
{
public:
  using error::error;
};

class rule_conflict : public error
{
public:
  using error::error;
};

class shape_mismatch : public error
{
public:
  using error::error;
};

class masked_action_realized : public error
{
public:
  using error::error;
};

class missing_measurement : public error
{
public:
  using error::error;
};

class non_finite_loss : public error
{
public:
  using error::error;
};

/*! \brief Malformed task file; `where` names the offending line or field. */
class parse_error : public error
{
public:
  parse_error( std::string const& where, std::string const& what )
      : error( where + ": " + what ), where_( where )
  {
  }

  std::string const& where() const noexcept { return where_; }

private:
  std::string where_;
};

/*! \brief A task that parsed but violates one or more invariants. */
class validation_error : public error
{
public:
  explicit validation_error( std::vector<std::string> violations )
      : error( join( violations ) ), violations_( std::move( violations ) )
  {
  }

  std::vector<std::string> const& violations() const noexcept { return violations_; }

private:
  static std::string join( std::vector<std::string> const& v )
  {
    std::string s = "task validation failed:";
    for ( auto const& x : v )
    {
      s += "\n  - " + x;
    }
    return s;
  }

  std::vector<std::string> violations_;
};

} // namespace netcomp
