//! Account details from key/value style artifacts.

use crate::model::AccountInfo;

pub fn is_email(s: &str) -> bool {
    let s = s.trim();
    let Some((local, domain)) = s.split_once('@') else {
        return false;
    };
    !local.is_empty()
        && !domain.contains('@')
        && domain.contains('.')
        && !domain.starts_with('.')
        && !domain.ends_with('.')
        && !s.contains(char::is_whitespace)
        && !s.contains('/')
}

fn norm_key(k: &str) -> String {
    k.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Interprets `(key, value)` pairs by key name. Any email-shaped value is
/// taken as the email when no email-named key supplies one.
pub fn account_from_pairs<'a, I>(pairs: I) -> AccountInfo
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut acct = AccountInfo::default();
    let mut loose_email = None;
    let mut first = None;
    let mut last = None;
    for (k, v) in pairs {
        let v = v.trim();
        if v.is_empty() {
            continue;
        }
        let k = norm_key(k);
        let set = |slot: &mut Option<String>| {
            if slot.is_none() {
                *slot = Some(v.to_string());
            }
        };
        if is_email(v) {
            if k.contains("email") || k.contains("login") || k.contains("user") {
                set(&mut acct.email);
            } else if loose_email.is_none() {
                loose_email = Some(v.to_string());
            }
            continue;
        }
        if k.contains("token") {
            set(&mut acct.auth_token);
        } else if k.contains("password") || k.contains("passhash") || k.contains("pwdhash") {
            set(&mut acct.password_hash);
        } else if k == "uid" || k.ends_with("userid") || k == "accountid" {
            set(&mut acct.user_id);
        } else if k.contains("firstname") || k == "givenname" {
            set(&mut first);
        } else if k.contains("lastname") || k == "surname" || k == "familyname" {
            set(&mut last);
        } else if k.contains("username") || k.contains("displayname") || k.contains("fullname") {
            set(&mut acct.display_name);
        }
    }
    if acct.email.is_none() {
        acct.email = loose_email;
    }
    if acct.display_name.is_none() {
        acct.display_name = match (first, last) {
            (Some(f), Some(l)) => Some(format!("{f} {l}")),
            (f, l) => f.or(l),
        };
    }
    acct
}

/// `key=value` or `key: value` lines.
pub fn parse_kv_text(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|line| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                return None;
            }
            let (k, v) = line.split_once('=').or_else(|| line.split_once(':'))?;
            Some((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn email_shapes() {
        assert!(is_email("jdoe@example.com"));
        assert!(!is_email("jdoe@localhost"));
        assert!(!is_email("@example.com"));
        assert!(!is_email("a b@example.com"));
        assert!(!is_email("/Box/jdoe@example.com/"));
    }

    #[test]
    fn key_rules() {
        let a = account_from_pairs([
            ("authToken", "u5es7xli4xejrh89kr6xu14tks6grjn3"),
            ("userEmail", "jdoe@example.com"),
            ("FirstName", "Jane"),
            ("LastName", "Doe"),
            ("password_hash", "5f4dcc3b5aa765d61d8327deb882cf99"),
            ("userid", "4711"),
        ]);
        assert_eq!(
            a.auth_token.as_deref(),
            Some("u5es7xli4xejrh89kr6xu14tks6grjn3")
        );
        assert_eq!(a.email.as_deref(), Some("jdoe@example.com"));
        assert_eq!(a.display_name.as_deref(), Some("Jane Doe"));
        assert_eq!(
            a.password_hash.as_deref(),
            Some("5f4dcc3b5aa765d61d8327deb882cf99")
        );
        assert_eq!(a.user_id.as_deref(), Some("4711"));
    }

    #[test]
    fn loose_email_fallback() {
        let a = account_from_pairs([("value", "x@y.org"), ("key", "EMAIL")]);
        assert_eq!(a.email.as_deref(), Some("x@y.org"));
    }

    #[test]
    fn kv_lines() {
        let kv = parse_kv_text("email=a@b.com\n# c\nuid: 9\nnoise\n");
        assert_eq!(
            kv,
            vec![
                ("email".into(), "a@b.com".into()),
                ("uid".into(), "9".into())
            ]
        );
    }
}
