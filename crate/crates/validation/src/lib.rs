//! Holds the acceptance suite in `tests/acceptance`. It lives in its own
//! package so that it runs after every other suite in the workspace.
