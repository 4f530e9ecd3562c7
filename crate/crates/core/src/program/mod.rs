//! Integer programs: model, text format and interpreter.

mod interp;
mod ir;
mod parser;

pub use interp::{eval_step, run, Config, Executor, FirstEnabled, Halt, Scheduler, SeededScheduler, Trace};
pub use ir::{
    apply_update, fmt_update, identity_update, is_identity_on, loop_of_transition, then, update_pow, Guard,
    Location, Loop, Program, ProgramError, Renaming, Transition, Update,
};
pub use parser::{parse_guard, parse_polynomial, parse_program, pretty_print, ParseError, ParseErrorKind};
