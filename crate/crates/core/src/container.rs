//! Minimal ZIP container: stored (uncompressed) entries, zeroed DOS
//! timestamps, no extra fields, no comments. Writing is bit-exact so that
//! package hashes are stable; reading accepts any archive whose entries are
//! stored, in any order.

use thiserror::Error;

const LOCAL_HEADER_SIG: u32 = 0x0403_4b50;
const CENTRAL_HEADER_SIG: u32 = 0x0201_4b50;
const END_OF_CENTRAL_DIR_SIG: u32 = 0x0605_4b50;
const VERSION_STORED: u16 = 10;
const METHOD_STORED: u16 = 0;
const LOCAL_HEADER_LEN: usize = 30;
const EOCD_LEN: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("not a zip archive: {0}")]
    Malformed(&'static str),
    #[error("entry {name:?} uses compression method {method}; only stored entries are supported")]
    Compressed { name: String, method: u16 },
    #[error("entry {0:?} failed its CRC-32 check")]
    Checksum(String),
    #[error("entry {0:?} appears more than once")]
    Duplicate(String),
    #[error("archive too large for a package")]
    TooLarge,
}

/// One named file inside the archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub data: Vec<u8>,
}

fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Writes entries in the given order as a stored archive.
pub fn write_archive<'a, I>(entries: I) -> Result<Vec<u8>, ContainerError>
where
    I: IntoIterator<Item = (&'a str, &'a [u8])>,
{
    let mut out = Vec::new();
    let mut central = Vec::new();
    let mut count: u16 = 0;
    for (name, data) in entries {
        let offset = u32::try_from(out.len()).map_err(|_| ContainerError::TooLarge)?;
        let size = u32::try_from(data.len()).map_err(|_| ContainerError::TooLarge)?;
        let name_len = u16::try_from(name.len()).map_err(|_| ContainerError::TooLarge)?;
        let crc = crc32fast::hash(data);

        put_u32(&mut out, LOCAL_HEADER_SIG);
        put_u16(&mut out, VERSION_STORED);
        put_u16(&mut out, 0); // flags
        put_u16(&mut out, METHOD_STORED);
        put_u16(&mut out, 0); // mod time
        put_u16(&mut out, 0); // mod date
        put_u32(&mut out, crc);
        put_u32(&mut out, size);
        put_u32(&mut out, size);
        put_u16(&mut out, name_len);
        put_u16(&mut out, 0); // extra len
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(data);

        put_u32(&mut central, CENTRAL_HEADER_SIG);
        put_u16(&mut central, VERSION_STORED); // made by: MS-DOS, 1.0
        put_u16(&mut central, VERSION_STORED);
        put_u16(&mut central, 0);
        put_u16(&mut central, METHOD_STORED);
        put_u16(&mut central, 0);
        put_u16(&mut central, 0);
        put_u32(&mut central, crc);
        put_u32(&mut central, size);
        put_u32(&mut central, size);
        put_u16(&mut central, name_len);
        put_u16(&mut central, 0); // extra len
        put_u16(&mut central, 0); // comment len
        put_u16(&mut central, 0); // disk number
        put_u16(&mut central, 0); // internal attrs
        put_u32(&mut central, 0); // external attrs
        put_u32(&mut central, offset);
        central.extend_from_slice(name.as_bytes());
        count = count.checked_add(1).ok_or(ContainerError::TooLarge)?;
    }
    let cd_offset = u32::try_from(out.len()).map_err(|_| ContainerError::TooLarge)?;
    let cd_size = u32::try_from(central.len()).map_err(|_| ContainerError::TooLarge)?;
    out.extend_from_slice(&central);
    put_u32(&mut out, END_OF_CENTRAL_DIR_SIG);
    put_u16(&mut out, 0);
    put_u16(&mut out, 0);
    put_u16(&mut out, count);
    put_u16(&mut out, count);
    put_u32(&mut out, cd_size);
    put_u32(&mut out, cd_offset);
    put_u16(&mut out, 0);
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn at(buf: &'a [u8], pos: usize) -> Self {
        Self { buf, pos }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        let end = self
            .pos
            .checked_add(n)
            .ok_or(ContainerError::Malformed("offset overflow"))?;
        let s = self
            .buf
            .get(self.pos..end)
            .ok_or(ContainerError::Malformed("truncated"))?;
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, ContainerError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, ContainerError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

fn find_eocd(bytes: &[u8]) -> Result<usize, ContainerError> {
    if bytes.len() < EOCD_LEN {
        return Err(ContainerError::Malformed("too short"));
    }
    // The record may be followed by a comment of up to 64 KiB.
    let lowest = bytes.len().saturating_sub(EOCD_LEN + u16::MAX as usize);
    let sig = END_OF_CENTRAL_DIR_SIG.to_le_bytes();
    (lowest..=bytes.len() - EOCD_LEN)
        .rev()
        .find(|&i| bytes[i..i + 4] == sig)
        .ok_or(ContainerError::Malformed(
            "end of central directory not found",
        ))
}

/// Reads every entry of a stored archive, in central-directory order.
pub fn read_archive(bytes: &[u8]) -> Result<Vec<Entry>, ContainerError> {
    let eocd = find_eocd(bytes)?;
    let mut c = Cursor::at(bytes, eocd + 4);
    let _disk = c.u16()?;
    let _cd_disk = c.u16()?;
    let _entries_here = c.u16()?;
    let total = c.u16()? as usize;
    let _cd_size = c.u32()?;
    let cd_offset = c.u32()? as usize;

    let mut entries: Vec<Entry> = Vec::with_capacity(total);
    let mut c = Cursor::at(bytes, cd_offset);
    for _ in 0..total {
        if c.u32()? != CENTRAL_HEADER_SIG {
            return Err(ContainerError::Malformed("bad central directory signature"));
        }
        let _made_by = c.u16()?;
        let _needed = c.u16()?;
        let flags = c.u16()?;
        let method = c.u16()?;
        let _time = c.u16()?;
        let _date = c.u16()?;
        let crc = c.u32()?;
        let csize = c.u32()? as usize;
        let usize_ = c.u32()? as usize;
        let name_len = c.u16()? as usize;
        let extra_len = c.u16()? as usize;
        let comment_len = c.u16()? as usize;
        let _disk = c.u16()?;
        let _internal = c.u16()?;
        let _external = c.u32()?;
        let local_offset = c.u32()? as usize;
        let name = String::from_utf8(c.take(name_len)?.to_vec())
            .map_err(|_| ContainerError::Malformed("entry name is not UTF-8"))?;
        c.take(extra_len + comment_len)?;

        if flags & 0x0001 != 0 {
            return Err(ContainerError::Malformed(
                "encrypted entries are not supported",
            ));
        }
        if method != METHOD_STORED {
            return Err(ContainerError::Compressed { name, method });
        }
        if csize != usize_ {
            return Err(ContainerError::Malformed("stored entry sizes disagree"));
        }

        let mut local = Cursor::at(bytes, local_offset);
        if local.u32()? != LOCAL_HEADER_SIG {
            return Err(ContainerError::Malformed("bad local header signature"));
        }
        local.take(LOCAL_HEADER_LEN - 4 - 4)?;
        let local_name_len = local.u16()? as usize;
        let local_extra_len = local.u16()? as usize;
        local.take(local_name_len + local_extra_len)?;
        let data = local.take(csize)?.to_vec();
        if crc32fast::hash(&data) != crc {
            return Err(ContainerError::Checksum(name));
        }
        if entries.iter().any(|e| e.name == name) {
            return Err(ContainerError::Duplicate(name));
        }
        entries.push(Entry { name, data });
    }
    Ok(entries)
}
