import { CHARSET } from "./protocol";
function validateAddress(raw) {
  if (!/^\d+$/.test(raw.trim())) return null;
  const value = Number(raw.trim());
  return value >= 1 && value <= 63 ? value : null;
}
function foldCharacter(raw) {
  if (raw.length !== 1) return null;
  const upper = raw.toUpperCase();
  return CHARSET.includes(upper) ? upper : null;
}
export {
  foldCharacter,
  validateAddress
};
