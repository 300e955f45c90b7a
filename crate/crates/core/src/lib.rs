pub mod analyzers;
pub mod carver;
pub mod codecs;
pub mod evidence;
pub mod hashing;
pub mod locator;
pub mod merge;
pub mod model;
pub mod plist;
pub mod sqlite;
