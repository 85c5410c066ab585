// Client-side input rules: address range and the codable alphabet.

import { CHARSET } from "./protocol";

export function validateAddress(raw: string): number | null {
  if (!/^\d+$/.test(raw.trim())) return null;
  const value = Number(raw.trim());
  return value >= 1 && value <= 63 ? value : null;
}

/** Case-fold one keystroke; null when the character cannot be coded. */
export function foldCharacter(raw: string): string | null {
  if (raw.length !== 1) return null;
  const upper = raw.toUpperCase();
  return CHARSET.includes(upper) ? upper : null;
}
