//! Nilpotent quotients of L-presented groups.
//!
//! The crate computes consistent weighted nilpotent presentations of the
//! lower central quotients of groups given by finite L-presentations, and
//! ships the surrounding machinery: free words and endomorphisms (`words`),
//! the L-presentation data model, text format and catalog (`lpres`), exact
//! integer lattices via Hermite and Smith normal forms (`intlat`), weighted
//! polycyclic presentations with collection and consistency checking
//! (`pcgroup`), the quotient engine itself (`nq`), self-similar tree actions
//! used as an independent oracle (`treeaction`), and closed-form rank data
//! for regression checks (`refdata`).

pub mod intlat;
pub mod lpres;
pub mod nq;
pub mod pcgroup;
pub mod refdata;
pub mod treeaction;
pub mod words;
