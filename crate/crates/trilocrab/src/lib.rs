//! File formats, rendering, and the command-line driver around
//! [`trilocrab_core`].
