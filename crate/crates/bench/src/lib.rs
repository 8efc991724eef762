pub mod criterion {
    //! Re-exports the criterion API so the bench targets share one switch
    //! point for the backend.

    pub use criterion::*;
}
