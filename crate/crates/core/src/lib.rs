pub mod lang;
pub mod parser;
pub mod typeinf;
pub mod mgtt;
pub mod apd;
pub mod diagnostics;
pub mod session;
pub mod corpus;
